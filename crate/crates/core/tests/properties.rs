mod common;

use graphcake::allocator::verify_partition;
use graphcake::instances::{gen_random_forest_instance, random_connected_piece, random_tree, random_valuation, InstanceDoc};
use graphcake::mms::mms_path_exact;
use graphcake::{EdgeId, Error, MetricGraph, Piece, Valuation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn documents_round_trip_bit_identically() {
    for seed in 0..500 {
        let doc = gen_random_forest_instance(seed, 1 + (seed % 3) as usize, 8, 1 + (seed % 3) as usize, 0.25).unwrap();
        let text = doc.to_json().unwrap();
        let back = InstanceDoc::from_json(&text).unwrap();
        assert_eq!(back, doc, "seed {seed}");
        assert_eq!(back.to_json().unwrap(), text, "seed {seed}");
    }
}

#[test]
fn generated_partitions_are_certified() {
    for seed in 0..500 {
        let doc = gen_random_forest_instance(seed, 2, 9, 3, 0.4).unwrap();
        let g = doc.graph().unwrap();
        for p in doc.partitions(&g).unwrap() {
            let report = verify_partition(&g, &p, None, None);
            assert!(report.passed, "seed {seed}: {report:?}");
        }
    }
}

fn path(lengths: &[f64]) -> MetricGraph {
    let triples: Vec<(u32, u32, f64)> = lengths.iter().enumerate().map(|(i, &l)| (i as u32, i as u32 + 1, l)).collect();
    MetricGraph::from_edges(&triples).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn share_shrinks_with_more_parts_and_more_separation(
        lengths in prop::collection::vec(0.5f64..2.0, 1..4),
        densities in prop::collection::vec(0.0f64..3.0, 4),
        k in 1usize..4,
        s in 0.0f64..0.5,
    ) {
        let g = path(&lengths);
        let per_edge: Vec<_> = lengths.iter().enumerate()
            .map(|(i, &l)| (EdgeId(i as u32), vec![(0.0, l, densities[i])]))
            .collect();
        let v = Valuation::new(&g, &per_edge).unwrap();
        let share = |k, s| match mms_path_exact(&v, &g, k, s) {
            Ok(r) => Some(r.value),
            Err(Error::NoPartition { .. }) => None,
            Err(e) => panic!("{e}"),
        };
        let a = share(k, s);
        let b = share(k + 1, s);
        let c = share(k, s + 0.2);
        prop_assert!(b <= a.map(|a| a + 1e-6));
        prop_assert!(c <= a.map(|a| a + 1e-6));
        if let Some(a) = a {
            prop_assert!(a <= v.total_value() / k as f64 + 1e-6);
        }
    }

    #[test]
    fn piece_values_are_additive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_tree(&mut rng, 6, (0.5, 2.0)).unwrap();
        let v = random_valuation(&mut rng, &g).unwrap();
        let a = random_connected_piece(&mut rng, &g).unwrap();
        let b = random_connected_piece(&mut rng, &g).unwrap();
        let lhs = v.piece_value(&a.union(&b)) + v.piece_value(&a.intersection(&b));
        let rhs = v.piece_value(&a) + v.piece_value(&b);
        prop_assert!((lhs - rhs).abs() < 1e-9);
        prop_assert!(v.piece_value(&Piece::empty()) == 0.0);
    }

    #[test]
    fn distances_are_symmetric_and_triangular(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_tree(&mut rng, 7, (0.5, 2.0)).unwrap();
        let whole = g.live().clone();
        let p = common::point_in(&mut rng, &g, &whole);
        let q = common::point_in(&mut rng, &g, &whole);
        let r = common::point_in(&mut rng, &g, &whole);
        let d = |x, y| g.shortest_distance(x, y).unwrap().value();
        prop_assert!((d(&p, &q) - d(&q, &p)).abs() < 1e-9);
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-9);
    }
}
