//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use graphcake::allocator::{
    allocate_forest, allocate_general, allocate_unicyclic_union, verify_allocation, AgentPartition, AllocatedPiece,
    Allocation, BipartiteGraph, IntersectionMode,
};
use graphcake::good_piece::{find_s_good, find_s_good_rooted, find_zero_good, is_s_good, is_zero_good};
use graphcake::instances::{
    check_positive_value_bound, gen_cycle_counterexample, random_connected_piece, random_forest,
    random_graph_with_small_fvs, random_partition, random_point, random_tree, random_unicyclic_union,
};
use graphcake::mms::{mms_discretized, mms_path_exact};
use graphcake::{EdgeId, MetricGraph, Piece, PointRef, Valuation, TOLERANCE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn close(g: &MetricGraph, p: &PointRef, q: &PointRef) -> bool {
    g.shortest_distance(p, q).map(|d| d.value() <= TOLERANCE).unwrap_or(false)
}

fn c1_good_pieces() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..1000 {
        let size = rng.gen_range(2..=12);
        let g = random_tree(&mut rng, size, (0.5, 2.0)).unwrap();
        let size = rng.gen_range(1..=20);
        let family: Vec<Piece> = (0..size).map(|_| random_connected_piece(&mut rng, &g).unwrap()).collect();
        let j = find_zero_good(&g, &family).map_err(|e| format!("trial {trial}: find_zero_good: {e}"))?;
        if !is_zero_good(&family, j) {
            return Err(format!("trial {trial}: member {j} is not 0-good"));
        }
        let closed: Vec<Piece> = family.iter().map(|x| x.closure(&g)).collect();
        let diam = common::diameter(&g);
        let s = rng.gen_range(0.0..diam).max(1e-3);
        let (j, _) = find_s_good(&g, &closed, s).map_err(|e| format!("trial {trial}: find_s_good: {e}"))?;
        if !is_s_good(&g, &closed, j, s).unwrap() {
            return Err(format!("trial {trial}: member {j} is not {s}-good"));
        }
    }
    Ok("1000 trees, both selectors sound".into())
}

fn c2_real_tree() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 1000 {
        let size = rng.gen_range(2..=12);
        let g = random_tree(&mut rng, size, (0.5, 2.0)).unwrap();
        let x = random_connected_piece(&mut rng, &g).unwrap().closure(&g);
        let r = random_point(&mut rng, &g).unwrap();
        let xs = g.nearest_in_piece_to_point(&x, &r).map_err(|e| e.to_string())?;
        let xr = g.shortest_distance(&xs, &r).unwrap().value();
        for _ in 0..20 {
            let y = common::point_in(&mut rng, &g, &x);
            let gap = g.shortest_distance(&y, &r).unwrap().value() - g.shortest_distance(&y, &xs).unwrap().value() - xr;
            worst = worst.max(gap.abs());
        }
        let rp = random_connected_piece(&mut rng, &g).unwrap().closure(&g);
        if !rp.intersects(&x) {
            let through = g.nearest_in_piece_to_piece(&x, &rp).map_err(|e| e.to_string())?;
            for _ in 0..10 {
                let r = common::point_in(&mut rng, &g, &rp);
                let single = g.nearest_in_piece_to_point(&x, &r).map_err(|e| e.to_string())?;
                if !close(&g, &through, &single) {
                    return Err(format!("instance {done}: nearest to set {through:?} vs to point {single:?}"));
                }
            }
        }
        done += 1;
    }
    if worst > TOLERANCE {
        return Err(format!("decomposition identity off by {worst:e}"));
    }
    Ok(format!("1000 instances, worst identity gap {worst:.1e}"))
}

fn parts_kept(alloc: &Allocation, parts: &[AgentPartition], exact: bool) -> Result<(), String> {
    for p in parts {
        let AllocatedPiece { piece, contains_part, .. } =
            alloc.piece_of(p.agent).ok_or_else(|| format!("agent {} unserved", p.agent))?;
        let j = contains_part.ok_or_else(|| format!("agent {} has no part recorded", p.agent))?;
        let ok = if exact { *piece == p.parts[j] } else { p.parts[j].is_subset(piece) };
        if !ok {
            return Err(format!("agent {} piece does not match part {j}", p.agent));
        }
    }
    Ok(())
}

fn partitions<R: Rng>(rng: &mut R, g: &MetricGraph, n: usize, k: usize, s: f64) -> Option<Vec<AgentPartition>> {
    (0..n).map(|a| random_partition(rng, g, a, k, s).ok()).collect()
}

fn c3_forest() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for positive in [false, true] {
        let mut done = 0;
        while done < 1000 {
            let s: f64 = if positive { rng.gen_range(0.05..1.0) } else { 0.0 };
            let unit = s.max(1.0);
            let trees = rng.gen_range(1..=3);
            let vertices = rng.gen_range(2 * trees..=12);
            let g = random_forest(&mut rng, trees, vertices, (unit, 3.0 * unit)).unwrap();
            let n = rng.gen_range(1..=6);
            let Some(parts) = partitions(&mut rng, &g, n, n, s) else { continue };
            let alloc = allocate_forest(&g, &parts, s).map_err(|e| format!("s={s}: {e}"))?;
            parts_kept(&alloc, &parts, true)?;
            let report = verify_allocation(&g, &alloc, s, IntersectionMode::Disjoint, Some(&parts), None, None);
            if !report.passed {
                return Err(format!("s={s}: {:?}", report.failures));
            }
            done += 1;
        }
    }
    Ok("1000 instances at s=0 and 1000 at s>0".into())
}

fn c4_general() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut done = 0;
    while done < 300 {
        let s: f64 = if done % 2 == 0 { 0.0 } else { rng.gen_range(0.05..1.0) };
        let unit = s.max(1.0);
        let (vertices, extra) = (rng.gen_range(3..=10), rng.gen_range(0..=2));
        let g = random_graph_with_small_fvs(&mut rng, vertices, extra, (unit, 3.0 * unit)).unwrap();
        let f = g.fvs().len();
        if f > 2 {
            return Err(format!("generator produced fvs {f}"));
        }
        let n = rng.gen_range(1..=4);
        let Some(parts) = partitions(&mut rng, &g, n, n + f, s) else { continue };
        let alloc = allocate_general(&g, &parts, s).map_err(|e| format!("s={s}: {e}"))?;
        parts_kept(&alloc, &parts, true)?;
        let report = verify_allocation(&g, &alloc, s, IntersectionMode::Disjoint, Some(&parts), None, None);
        if !report.passed {
            return Err(format!("s={s}: {:?}", report.failures));
        }
        done += 1;
    }
    Ok("300 graphs with fvs <= 2".into())
}

fn c5_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_ratio: f64 = 0.0;
    for trial in 0..200 {
        let edges = rng.gen_range(1..=3u32);
        let triples: Vec<(u32, u32, f64)> = (0..edges).map(|i| (i, i + 1, rng.gen_range(0.5..2.0))).collect();
        let g = MetricGraph::from_edges(&triples).unwrap();
        let mut budget = 5;
        let mut per_edge = Vec::new();
        for &(i, _, len) in &triples {
            if budget == 0 {
                break;
            }
            let pieces = rng.gen_range(1..=budget.min(2));
            budget -= pieces;
            let cut = rng.gen_range(0.2..0.8) * len;
            let segs = if pieces == 1 {
                vec![(0.0, len, rng.gen_range(0.0..3.0))]
            } else {
                vec![(0.0, cut, rng.gen_range(0.0..3.0)), (cut, len, rng.gen_range(0.0..3.0))]
            };
            per_edge.push((EdgeId(i), segs));
        }
        let v = Valuation::new(&g, &per_edge).unwrap();
        let k = rng.gen_range(1..=4);
        let total = g.total_length();
        let s = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..total / (2.0 * k as f64)) };
        let delta = total / 40.0;
        let exact = mms_path_exact(&v, &g, k, s).map_err(|e| format!("trial {trial}: {e}"))?;
        let grid = mms_discretized(&v, &g, k, s, Some(delta)).map_err(|e| format!("trial {trial}: {e}"))?;
        let bound = v.max_density() * k as f64 * delta;
        let diff = (exact.value - grid.value).abs();
        if diff > bound + TOLERANCE {
            return Err(format!(
                "trial {trial}: exact {} vs discretized {} exceeds {bound}",
                exact.value, grid.value
            ));
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(diff / bound);
        }
    }
    Ok(format!("200 paths, worst |diff| / bound = {worst_ratio:.3}"))
}

fn certified_min(n: usize, r: usize) -> Result<f64, String> {
    let doc = gen_cycle_counterexample(n, r, 1.0, 0.05).map_err(|e| e.to_string())?;
    let g = doc.graph().unwrap();
    let vals = doc.valuations(&g).unwrap();
    let mut min = f64::INFINITY;
    for (a, p) in doc.partitions(&g).unwrap().iter().enumerate() {
        p.validate(&g).map_err(|e| e.to_string())?;
        for x in &p.parts {
            min = min.min(vals[a].piece_value(x));
        }
    }
    Ok(min)
}

fn c6_case_one() -> Outcome {
    let min = certified_min(2, 2)?;
    if (min - 1.0).abs() > TOLERANCE {
        return Err(format!("certified min part value {min}"));
    }
    let doc = gen_cycle_counterexample(2, 2, 1.0, 0.05).unwrap();
    let g = doc.graph().unwrap();
    let v = doc.valuation(&g, 0).unwrap();
    let mms = mms_discretized(&v, &g, 2, 1.0, None).map_err(|e| e.to_string())?;
    if mms.value < 0.95 {
        return Err(format!("discretized share {}", mms.value));
    }
    let best = check_positive_value_bound(&doc, None).map_err(|e| e.to_string())?;
    if best != 1 {
        return Err(format!("positive-value bound {best}, expected 1"));
    }
    Ok(format!("min part 1, share {:.4}, bound 1", mms.value))
}

/// Four agents on the square each get a sliver of one of their regions;
/// consecutive slivers lie on consecutive sides, exactly one unit apart.
fn staircase() -> Result<bool, String> {
    let doc = gen_cycle_counterexample(4, 1, 1.0, 0.05).unwrap();
    let g = doc.graph().unwrap();
    let vals = doc.valuations(&g).unwrap();
    let slivers = [(3usize, 0u32, 0.20), (2, 1, 0.16), (1, 2, 0.12), (0, 3, 0.08)];
    let mut pieces: Vec<AllocatedPiece> = slivers
        .iter()
        .map(|&(agent, edge, at)| AllocatedPiece {
            agent,
            piece: Piece::closed_interval(&g, EdgeId(edge), at, at + 0.01).unwrap(),
            contains_part: None,
        })
        .collect();
    pieces.sort_by_key(|p| p.agent);
    let positive = pieces.iter().all(|p| vals[p.agent].piece_value(&p.piece) > 0.0);
    let alloc = Allocation { separation: 1.0, pieces };
    let report = verify_allocation(&g, &alloc, 1.0, IntersectionMode::Disjoint, None, None, None);
    Ok(positive && report.passed)
}

fn c7_case_two() -> Outcome {
    let min = certified_min(4, 1)?;
    if (min - 1.0).abs() > TOLERANCE {
        return Err(format!("certified min part value {min}"));
    }
    let doc = gen_cycle_counterexample(4, 1, 1.0, 0.05).unwrap();
    let best = check_positive_value_bound(&doc, None).map_err(|e| e.to_string())?;
    if best != 3 {
        let witness = staircase()?;
        return Err(format!(
            "positive-value bound {best}, expected 3; explicit 1-separated allocation serving all four agents verifies: {witness}"
        ));
    }
    Ok("min part 1, bound 3".into())
}

fn c8_star() -> Outcome {
    let g = MetricGraph::from_edges(&[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
    let iv = |e: u32, a: f64| Piece::closed_interval(&g, EdgeId(e), a, 1.0).unwrap();
    let family = vec![iv(0, 0.25), iv(2, 0.25), iv(1, 0.2)];
    let bob = 2;
    if is_s_good(&g, &family, bob, 0.5).unwrap() {
        return Err("B reported 0.5-good".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let root = random_point(&mut rng, &g).unwrap();
        let (j, _) = find_s_good_rooted(&g, &family, 0.5, Some(root), false).map_err(|e| e.to_string())?;
        if j == bob {
            return Err(format!("B selected for root {root:?}"));
        }
    }
    Ok("B not good, never selected over 5 roots".into())
}

fn c9_fvs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..200 {
        let (vertices, extra) = (rng.gen_range(2..=10), rng.gen_range(0..=6));
        let g = random_graph_with_small_fvs(&mut rng, vertices, extra, (0.5, 2.0)).unwrap();
        let f = g.fvs();
        let rest = g.delete_vertices(&f).map_err(|e| e.to_string())?;
        if !rest.is_forest() {
            return Err(format!("trial {trial}: deleting {f:?} leaves a cycle"));
        }
        if f.len() > g.circuit_rank() {
            return Err(format!("trial {trial}: |fvs| {} > circuit rank {}", f.len(), g.circuit_rank()));
        }
    }
    Ok("200 graphs".into())
}

fn c10_unicyclic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut done = 0;
    while done < 100 {
        let s: f64 = if done % 2 == 0 { 0.0 } else { rng.gen_range(0.05..1.0) };
        let unit = s.max(1.0);
        let cyclic = rng.gen_range(0..=3);
        let trees = rng.gen_range(if cyclic == 0 { 1 } else { 0 }..=2);
        let g = random_unicyclic_union(&mut rng, cyclic, trees, (unit, 3.0 * unit)).unwrap();
        let n = rng.gen_range(1..=4);
        let need = (n + cyclic).min(2 * n - 1);
        let Some(parts) = partitions(&mut rng, &g, n, need, s) else { continue };
        let (alloc, report) = allocate_unicyclic_union(&g, &parts, s).map_err(|e| format!("s={s}: {e}"))?;
        parts_kept(&alloc, &parts, false)?;
        let check = verify_allocation(&g, &alloc, s, IntersectionMode::Disjoint, Some(&parts), None, None);
        if !check.passed {
            return Err(format!("s={s}: {:?}", check.failures));
        }
        let comps = g.components();
        let cyc: Vec<&Piece> = comps.iter().filter(|c| g.restrict(c).fvs().len() == 1).collect();
        let mut edges = Vec::new();
        for (x, p) in parts.iter().enumerate() {
            for (y, c) in cyc.iter().enumerate() {
                if p.parts.iter().any(|part| part.is_subset(c)) {
                    edges.push((x, y));
                }
            }
        }
        let h = BipartiteGraph::new(n, cyc.len(), &edges).unwrap();
        report.decomposition.verify(&h).map_err(|e| format!("decomposition: {e}"))?;
        done += 1;
    }
    Ok("100 unions, decomposition re-verified each call".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 good-piece existence and soundness", Duration::from_secs(30), c1_good_pieces),
        ("2 real-tree nearest-point identities", Duration::from_secs(30), c2_real_tree),
        ("3 intact-part forest allocation", Duration::from_secs(120), c3_forest),
        ("4 general-graph reduction", Duration::from_secs(120), c4_general),
        ("5 oracle agreement on paths", Duration::from_secs(120), c5_oracles),
        ("6 two-cycle counterexample", Duration::from_secs(60), c6_case_one),
        ("7 square counterexample", Duration::from_secs(300), c7_case_two),
        ("8 star regression", Duration::from_secs(1), c8_star),
        ("9 feedback vertex sets", Duration::from_secs(60), c9_fvs),
        ("10 unicyclic-union pipeline", Duration::from_secs(120), c10_unicyclic),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > limit => Err(format!("{msg}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name} ({took:.2?}): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} ({took:.2?}): {msg}");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
