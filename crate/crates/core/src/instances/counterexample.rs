use std::collections::BTreeMap;

use super::InstanceDoc;
use crate::error::{Error, Result};
use crate::metric_graph::{Edge, EdgeId, IntervalOnEdge, MetricGraph, Piece, VertexId};
use crate::valuation::Valuation;

/// A cycle of `m` equal edges; edge `j` runs from vertex `j` to `j + 1`.
struct Cycle {
    edges: Vec<EdgeId>,
    side: f64,
}

impl Cycle {
    fn circumference(&self) -> f64 {
        self.side * self.edges.len() as f64
    }

    /// The arc `[x, x + w]` (positions taken around the cycle) in edge
    /// coordinates.
    fn arc(&self, x: f64, w: f64) -> Vec<(EdgeId, f64, f64)> {
        let c = self.circumference();
        let mut at = x.rem_euclid(c);
        let mut left = w;
        let mut out = Vec::new();
        while left > 1e-12 {
            let mut j = (at / self.side).floor() as usize;
            let mut off = at - j as f64 * self.side;
            if self.side - off <= 1e-12 {
                j += 1;
                off = 0.0;
            }
            let j = j % self.edges.len();
            let take = left.min(self.side - off);
            out.push((self.edges[j], off, off + take));
            left -= take;
            at = (j + 1) as f64 * self.side;
            if at >= c {
                at -= c;
            }
        }
        out
    }
}

struct Builder {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
}

impl Builder {
    fn cycle(&mut self, m: usize, side: f64) -> Cycle {
        let base = self.vertices.len() as u32;
        let mut ids = Vec::with_capacity(m);
        for j in 0..m as u32 {
            self.vertices.push(VertexId(base + j));
        }
        for j in 0..m as u32 {
            let id = EdgeId(self.edges.len() as u32);
            self.edges.push(Edge {
                id,
                u: VertexId(base + j),
                v: VertexId(base + (j + 1) % m as u32),
                length: side,
            });
            ids.push(id);
        }
        Cycle { edges: ids, side }
    }
}

/// A union of `r` cycles with `n` agents in which every agent has a
/// separated partition into `N - 1` parts of value 1, `N = min(n + r, 2n - 1)`,
/// yet no separated allocation is meant to give positive value to all agents.
///
/// With `r >= n`, every cycle has length `2s + 2eps` (two edges of length
/// `s + eps`); `n - 1` of them are valuable and agent `i` holds two antipodal
/// regions of length `eps` and value 1 on each, starting at `i/n` of a half
/// turn. With `r < n`, `r - 1` such small cycles are joined by a large cycle
/// of `m = n + 1 - r` sides of length `s + eps`, on which agent `i` holds one
/// region of length `eps` at offset `i * eps` of every side.
///
/// The returned document declares each agent's `N - 1`-part partition made
/// of her regions.
pub fn gen_cycle_counterexample(n: usize, r: usize, s: f64, eps: f64) -> Result<InstanceDoc> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidParameters("n and r must be positive".into()));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameters(format!("separation {s} must be positive")));
    }
    if !(eps > 0.0 && eps <= s / (4.0 * n as f64)) {
        return Err(Error::InvalidParameters(format!(
            "eps {eps} must lie in (0, s/(4n)] = (0, {}]",
            s / (4.0 * n as f64)
        )));
    }
    let side = s + eps;
    let mut b = Builder {
        vertices: Vec::new(),
        edges: Vec::new(),
    };
    // regions[agent] = list of arcs (cycle, start, width), each worth 1
    let mut regions: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut cycles = Vec::new();
    let small_valuable = if r >= n { n - 1 } else { r - 1 };
    let small_total = if r >= n { r } else { r - 1 };
    for c in 0..small_total {
        cycles.push(b.cycle(2, side));
        if c < small_valuable {
            for (a, list) in regions.iter_mut().enumerate() {
                let start = (a + 1) as f64 * side / n as f64;
                list.push((c, start));
                list.push((c, start + side));
            }
        }
    }
    if r < n {
        let m = n + 1 - r;
        let c = cycles.len();
        cycles.push(b.cycle(m, side));
        for (a, list) in regions.iter_mut().enumerate() {
            for j in 0..m {
                list.push((c, j as f64 * side + (a + 1) as f64 * eps));
            }
        }
    }
    let g = MetricGraph::new(b.vertices, b.edges)?;
    let density = 1.0 / eps;
    let mut valuations = Vec::with_capacity(n);
    let mut partitions = Vec::with_capacity(n);
    for list in &regions {
        let mut per_edge: BTreeMap<EdgeId, Vec<(f64, f64, f64)>> = BTreeMap::new();
        let mut parts = Vec::with_capacity(list.len());
        for &(c, start) in list {
            let arc = cycles[c].arc(start, eps);
            let ivs: Vec<IntervalOnEdge> = arc.iter().map(|&(e, a, z)| IntervalOnEdge::closed(e, a, z)).collect();
            parts.push(Piece::from_intervals(&g, &ivs)?);
            for (e, a, z) in arc {
                per_edge.entry(e).or_default().push((a, z, density));
            }
        }
        let per_edge: Vec<_> = per_edge.into_iter().collect();
        valuations.push(Valuation::new(&g, &per_edge)?);
        partitions.push(parts);
    }
    let mut doc = InstanceDoc::new(&g, &valuations, s);
    for (a, parts) in partitions.iter().enumerate() {
        doc.set_partition(&g, a, parts);
    }
    let meta = &mut doc.meta;
    meta.insert("generator".into(), "cycle-counterexample".into());
    meta.insert("n".into(), n.into());
    meta.insert("r".into(), r.into());
    meta.insert("s".into(), s.into());
    meta.insert("eps".into(), eps.into());
    meta.insert("case".into(), if r >= n { 1 } else { 2 }.into());
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::verify_partition;

    fn check(n: usize, r: usize, parts: usize) {
        let doc = gen_cycle_counterexample(n, r, 1.0, 0.05).unwrap();
        let g = doc.graph().unwrap();
        assert_eq!(g.components().len(), r);
        let vals = doc.valuations(&g).unwrap();
        for (a, p) in doc.partitions(&g).unwrap().iter().enumerate() {
            assert_eq!(p.parts.len(), parts);
            let report = verify_partition(&g, p, Some(&vals[a]), Some(1.0));
            assert!(report.passed, "{report:?}");
            for x in &p.parts {
                assert!((vals[a].piece_value(x) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn two_agents_two_cycles() {
        check(2, 2, 2);
        let doc = gen_cycle_counterexample(2, 2, 1.0, 0.05).unwrap();
        let g = doc.graph().unwrap();
        let v = doc.valuation(&g, 0).unwrap();
        assert!((v.total_value() - 2.0).abs() < 1e-9);
        assert_eq!(g.edges().len(), 4);
    }

    #[test]
    fn square_for_four_agents() {
        check(4, 1, 4);
        let doc = gen_cycle_counterexample(4, 1, 1.0, 0.05).unwrap();
        let g = doc.graph().unwrap();
        assert_eq!(g.edges().len(), 4);
        assert!((g.total_length() - 4.2).abs() < 1e-12);
    }

    #[test]
    fn three_agents_five_cycles() {
        check(3, 5, 4);
    }

    #[test]
    fn mixed_case_two() {
        check(4, 2, 5);
        check(5, 3, 7);
    }

    #[test]
    fn single_agent_has_no_parts() {
        check(1, 2, 0);
    }

    #[test]
    fn eps_must_be_small() {
        assert!(gen_cycle_counterexample(2, 2, 1.0, 0.2).is_err());
        assert!(gen_cycle_counterexample(0, 2, 1.0, 0.01).is_err());
    }
}
