use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::InstanceDoc;
use crate::allocator::AgentPartition;
use crate::error::{Error, Result};
use crate::metric_graph::{EdgeId, MetricGraph, Piece, PointRef};
use crate::valuation::Valuation;

/// Edge triples of a uniformly grown random tree on `vertices` vertices
/// numbered from `first`.
fn tree_triples<R: Rng>(rng: &mut R, first: u32, vertices: usize, lengths: (f64, f64)) -> Vec<(u32, u32, f64)> {
    (1..vertices as u32)
        .map(|i| {
            let parent = rng.gen_range(0..i);
            (first + parent, first + i, rng.gen_range(lengths.0..=lengths.1))
        })
        .collect()
}

fn check_lengths(lengths: (f64, f64)) -> Result<()> {
    if !(lengths.0 > 0.0 && lengths.0 <= lengths.1 && lengths.1.is_finite()) {
        return Err(Error::InvalidParameters(format!("bad length range {lengths:?}")));
    }
    Ok(())
}

/// A random tree with `vertices >= 2` vertices and edge lengths drawn from
/// `lengths`.
pub fn random_tree<R: Rng>(rng: &mut R, vertices: usize, lengths: (f64, f64)) -> Result<MetricGraph> {
    random_forest(rng, 1, vertices, lengths)
}

/// A random forest of `trees` trees sharing `vertices` vertices, each tree
/// having at least two.
pub fn random_forest<R: Rng>(rng: &mut R, trees: usize, vertices: usize, lengths: (f64, f64)) -> Result<MetricGraph> {
    check_lengths(lengths)?;
    if trees == 0 || vertices < 2 * trees {
        return Err(Error::InvalidParameters(format!(
            "{vertices} vertices cannot form {trees} trees of at least two vertices"
        )));
    }
    let mut sizes = vec![2usize; trees];
    for _ in 0..vertices - 2 * trees {
        let t = rng.gen_range(0..trees);
        sizes[t] += 1;
    }
    let mut triples = Vec::new();
    let mut first = 0u32;
    for size in sizes {
        triples.extend(tree_triples(rng, first, size, lengths));
        first += size as u32;
    }
    MetricGraph::from_edges(&triples)
}

/// A random connected graph: a tree plus `extra` random edges, so its
/// feedback vertex number is at most `extra`. Extra edges may be parallel
/// to existing ones.
pub fn random_graph_with_small_fvs<R: Rng>(
    rng: &mut R,
    vertices: usize,
    extra: usize,
    lengths: (f64, f64),
) -> Result<MetricGraph> {
    check_lengths(lengths)?;
    if vertices < 2 {
        return Err(Error::InvalidParameters("need at least two vertices".into()));
    }
    let mut triples = tree_triples(rng, 0, vertices, lengths);
    for _ in 0..extra {
        let u = rng.gen_range(0..vertices as u32);
        let mut v = rng.gen_range(0..vertices as u32 - 1);
        if v >= u {
            v += 1;
        }
        triples.push((u, v, rng.gen_range(lengths.0..=lengths.1)));
    }
    MetricGraph::from_edges(&triples)
}

/// A disjoint union of `cyclic` components with exactly one cycle each and
/// `trees` tree components, all small.
pub fn random_unicyclic_union<R: Rng>(
    rng: &mut R,
    cyclic: usize,
    trees: usize,
    lengths: (f64, f64),
) -> Result<MetricGraph> {
    check_lengths(lengths)?;
    if cyclic + trees == 0 {
        return Err(Error::InvalidParameters("need at least one component".into()));
    }
    let mut triples = Vec::new();
    let mut first = 0u32;
    for c in 0..cyclic + trees {
        let size = rng.gen_range(2..=5usize);
        triples.extend(tree_triples(rng, first, size, lengths));
        if c < cyclic {
            let u = rng.gen_range(0..size as u32);
            let mut v = rng.gen_range(0..size as u32 - 1);
            if v >= u {
                v += 1;
            }
            triples.push((first + u, first + v, rng.gen_range(lengths.0..=lengths.1)));
        }
        first += size as u32;
    }
    MetricGraph::from_edges(&triples)
}

/// A uniformly random point of the live edges, by length.
pub fn random_point<R: Rng>(rng: &mut R, g: &MetricGraph) -> Result<PointRef> {
    let total = g.total_length();
    let mut x = rng.gen_range(0.0..total);
    for e in g.edges() {
        if x < e.length {
            return g.point(e.id, x);
        }
        x -= e.length;
    }
    let last = g.edges().last().ok_or_else(|| Error::InvalidGraph("no edges".into()))?;
    g.point(last.id, last.length)
}

fn ball(g: &MetricGraph, centre: &PointRef, radius: f64, closed: bool) -> Result<Piece> {
    let open = g.s_neighborhood(&Piece::point(g, centre)?, radius)?;
    Ok(if closed { open.closure(g) } else { open })
}

/// A random connected piece: a ball around a random point (open or
/// closed), a single point, or on forests the union of tree paths from a
/// random point to a few others in its component.
pub fn random_connected_piece<R: Rng>(rng: &mut R, g: &MetricGraph) -> Result<Piece> {
    let centre = random_point(rng, g)?;
    let longest = g.edges().iter().map(|e| e.length).fold(0.0, f64::max);
    match rng.gen_range(0..10) {
        0 => Piece::point(g, &centre),
        1..=4 => ball(g, &centre, rng.gen_range(0.05..1.0) * longest, rng.gen_bool(0.7)),
        _ if g.is_forest() => {
            let mut piece = Piece::point(g, &centre)?;
            for _ in 0..rng.gen_range(1..=3) {
                let other = random_point(rng, g)?;
                if let Ok(path) = g.tree_path(&centre, &other) {
                    piece = piece.union(&path);
                }
            }
            Ok(piece)
        }
        _ => ball(g, &centre, rng.gen_range(0.05..1.0) * longest, true),
    }
}

/// A random valid partition of `g` into `k` closed balls, pairwise at
/// distance at least `s` (disjoint when `s = 0`).
pub fn random_partition<R: Rng>(
    rng: &mut R,
    g: &MetricGraph,
    agent: usize,
    k: usize,
    s: f64,
) -> Result<AgentPartition> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameters(format!("separation {s} must be finite and nonnegative")));
    }
    let need = s * 1.02 + 1e-6;
    let longest = g.edges().iter().map(|e| e.length).fold(0.0, f64::max);
    for _ in 0..200 {
        let mut centres: Vec<PointRef> = Vec::with_capacity(k);
        for _ in 0..k * 30 {
            if centres.len() == k {
                break;
            }
            let p = random_point(rng, g)?;
            let mut ok = true;
            for q in &centres {
                if g.shortest_distance(&p, q)?.value() <= need {
                    ok = false;
                    break;
                }
            }
            if ok {
                centres.push(p);
            }
        }
        if centres.len() < k {
            continue;
        }
        let mut parts = Vec::with_capacity(k);
        for (i, p) in centres.iter().enumerate() {
            let mut slack = longest;
            for (j, q) in centres.iter().enumerate() {
                if i != j {
                    slack = slack.min(g.shortest_distance(p, q)?.value() - s);
                }
            }
            let radius = rng.gen_range(0.1..0.9) * slack / 2.0;
            parts.push(ball(g, p, radius, true)?);
        }
        let partition = AgentPartition::new(agent, parts, s);
        partition.validate(g)?;
        return Ok(partition);
    }
    Err(Error::InvalidParameters(format!(
        "could not fit {k} parts at separation {s} on this graph"
    )))
}

/// Piecewise-constant random densities; some edges and segments are
/// worthless.
pub fn random_valuation<R: Rng>(rng: &mut R, g: &MetricGraph) -> Result<Valuation> {
    let mut per_edge = Vec::new();
    for e in g.edges() {
        if rng.gen_bool(0.2) {
            continue;
        }
        let pieces = rng.gen_range(1..=3usize);
        let mut cuts: Vec<f64> = (0..pieces - 1).map(|_| rng.gen_range(0.0..e.length)).collect();
        cuts.push(0.0);
        cuts.push(e.length);
        cuts.sort_by(f64::total_cmp);
        let segs: Vec<(f64, f64, f64)> = cuts
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let d = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.1..3.0) };
                (w[0], w[1], d)
            })
            .collect();
        per_edge.push((EdgeId(e.id.0), segs));
    }
    Valuation::new(g, &per_edge)
}

/// A seeded random forest instance with `n` agents, each declaring a random
/// valid partition into `n` parts at separation `s`. Edge lengths are drawn
/// from `[max(s, 1), 3 max(s, 1)]`.
pub fn gen_random_forest_instance(seed: u64, trees: usize, vertices: usize, n: usize, s: f64) -> Result<InstanceDoc> {
    if n == 0 {
        return Err(Error::InvalidParameters("need at least one agent".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = s.max(1.0);
    let g = random_forest(&mut rng, trees, vertices, (unit, 3.0 * unit))?;
    let valuations: Vec<Valuation> = (0..n).map(|_| random_valuation(&mut rng, &g)).collect::<Result<_>>()?;
    let mut doc = InstanceDoc::new(&g, &valuations, s);
    for a in 0..n {
        let p = random_partition(&mut rng, &g, a, n, s)?;
        doc.set_partition(&g, a, &p.parts);
    }
    let meta = &mut doc.meta;
    meta.insert("generator".into(), "random-forest".into());
    meta.insert("seed".into(), seed.into());
    meta.insert("trees".into(), trees.into());
    meta.insert("vertices".into(), vertices.into());
    meta.insert("n".into(), n.into());
    meta.insert("s".into(), s.into());
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_document() {
        let a = gen_random_forest_instance(11, 2, 8, 3, 0.5).unwrap();
        let b = gen_random_forest_instance(11, 2, 8, 3, 0.5).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = gen_random_forest_instance(12, 2, 8, 3, 0.5).unwrap();
        assert_ne!(a.to_json().unwrap(), c.to_json().unwrap());
    }

    #[test]
    fn single_agent_always_fits() {
        for seed in 0..20 {
            let doc = gen_random_forest_instance(seed, 1, 2, 1, 5.0).unwrap();
            let g = doc.graph().unwrap();
            doc.partitions(&g).unwrap()[0].validate(&g).unwrap();
        }
    }

    #[test]
    fn impossible_separation_is_an_error() {
        // one edge of length at most 30 cannot hold five parts 10 apart
        let r = gen_random_forest_instance(1, 1, 2, 5, 10.0);
        assert!(r.is_err());
    }

    #[test]
    fn unicyclic_components_have_one_feedback_vertex() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_unicyclic_union(&mut rng, 2, 1, (1.0, 2.0)).unwrap();
            let comps = g.components();
            assert_eq!(comps.len(), 3);
            let cyclic = comps.iter().filter(|c| g.restrict(c).fvs().len() == 1).count();
            assert_eq!(cyclic, 2);
        }
    }

    #[test]
    fn random_pieces_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let g = random_tree(&mut rng, 6, (0.5, 2.0)).unwrap();
            let p = random_connected_piece(&mut rng, &g).unwrap();
            assert!(!p.is_empty());
            assert!(g.is_connected_piece(&p));
        }
    }
}
