use serde::Serialize;

use super::{
    allocate_general, bipartite_decompose, check_agents, require_parts, AgentPartition, AllocatedPiece, Allocation,
    BipartiteDecomposition, BipartiteGraph,
};
use crate::error::{Error, Result};
use crate::metric_graph::{MetricGraph, Piece};
use crate::TOLERANCE;

/// Bookkeeping of one run, exposing the bound `n' + fvs(G') <= N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnicyclicReport {
    /// `min(n + fvs, 2n - 1)`.
    pub required_parts: usize,
    pub cyclic_components: usize,
    pub decomposition: BipartiteDecomposition,
    /// `|X_S| + |Y_S|`, the parts needed by the recursive call.
    pub residual_demand: usize,
}

/// Allocation on a disjoint union of components with feedback vertex number
/// at most one, from partitions with `min(n + fvs, 2n - 1)` parts.
///
/// Agents and cyclic components form a bipartite graph (an agent is adjacent
/// to a component holding one of her parts). Agents on the matched side of
/// its decomposition each receive a whole matched component; the rest share
/// the unmatched cyclic components and all tree components through
/// [`allocate_general`].
pub fn allocate_unicyclic_union(
    g: &MetricGraph,
    partitions: &[AgentPartition],
    s: f64,
) -> Result<(Allocation, UnicyclicReport)> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameters(format!("separation {s} must be finite and nonnegative")));
    }
    check_agents(partitions)?;
    let n = partitions.len();
    let components = g.components();
    let mut cyclic = Vec::new();
    let mut trees = Vec::new();
    for (i, c) in components.iter().enumerate() {
        match g.restrict(c).fvs().len() {
            0 => trees.push(i),
            1 => cyclic.push(i),
            k => {
                return Err(Error::Precondition(format!(
                    "component {i} needs {k} feedback vertices, at most one allowed"
                )))
            }
        }
    }
    let required = if n == 0 { 0 } else { (n + cyclic.len()).min(2 * n - 1) };
    require_parts(partitions, required)?;
    if s > 0.0 {
        if let Some(e) = g.edges().iter().find(|e| e.length < s - TOLERANCE) {
            return Err(Error::EdgeTooShort {
                edge: e.id,
                length: e.length,
                separation: s,
            });
        }
    }
    let prepared: Vec<AgentPartition> = partitions.iter().map(|p| p.prepared(g, s)).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| prepared[i].agent);
    // home component of every part
    let home: Vec<Vec<usize>> = prepared
        .iter()
        .map(|p| {
            p.parts
                .iter()
                .enumerate()
                .map(|(j, part)| {
                    components.iter().position(|c| part.is_subset(c)).ok_or_else(|| Error::InvalidPartition {
                        agent: p.agent,
                        reason: format!("part {j} is not inside one component"),
                    })
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<_>>()?;
    let mut edges = Vec::new();
    for (x, &i) in order.iter().enumerate() {
        for (y, &c) in cyclic.iter().enumerate() {
            if home[i].contains(&c) {
                edges.push((x, y));
            }
        }
    }
    let h = BipartiteGraph::new(n, cyclic.len(), &edges)?;
    let d = bipartite_decompose(&h)?;
    let residual_demand = d.x_small.len() + d.y_small.len();
    if !d.x_small.is_empty() && residual_demand > required {
        return Err(Error::Invariant(format!(
            "recursive demand {residual_demand} exceeds available parts {required}"
        )));
    }
    let mut pieces = Vec::with_capacity(n);
    for &(x, y) in &d.matching {
        let i = order[x];
        let c = cyclic[y];
        let part = home[i].iter().position(|&h| h == c).expect("adjacent agent has a part there");
        pieces.push(AllocatedPiece {
            agent: prepared[i].agent,
            piece: components[c].clone(),
            contains_part: Some(part),
        });
    }
    if !d.x_small.is_empty() {
        let mut keep: Vec<usize> = trees.clone();
        keep.extend(d.y_small.iter().map(|&y| cyclic[y]));
        let material = keep.iter().fold(Piece::empty(), |acc, &c| acc.union(&components[c]));
        let sub = g.restrict(&material);
        let small: Vec<AgentPartition> = d
            .x_small
            .iter()
            .map(|&x| {
                let i = order[x];
                let mut p = prepared[i].clone();
                p.parts = p
                    .parts
                    .iter()
                    .zip(&home[i])
                    .filter(|(_, c)| keep.contains(c))
                    .map(|(part, _)| part.clone())
                    .collect();
                p
            })
            .collect();
        let inner = allocate_general(&sub, &small, s)?;
        for mut piece in inner.pieces {
            let i = order[d.x_small[small.iter().position(|p| p.agent == piece.agent).expect("agent exists")]];
            let sub_parts = &small.iter().find(|p| p.agent == piece.agent).expect("agent exists").parts;
            piece.contains_part = piece
                .contains_part
                .and_then(|j| prepared[i].parts.iter().position(|x| *x == sub_parts[j]));
            pieces.push(piece);
        }
    }
    pieces.sort_by_key(|p| p.agent);
    let report = UnicyclicReport {
        required_parts: required,
        cyclic_components: cyclic.len(),
        decomposition: d,
        residual_demand,
    };
    Ok((Allocation { separation: s, pieces }, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::{allocate_forest, verify_allocation, IntersectionMode};
    use crate::metric_graph::EdgeId;

    fn iv(g: &MetricGraph, e: u32, a: f64, b: f64) -> Piece {
        Piece::closed_interval(g, EdgeId(e), a, b).unwrap()
    }

    #[test]
    fn trees_only_matches_forest_allocation() {
        let g = MetricGraph::from_edges(&[(0, 1, 2.0), (2, 3, 2.0)]).unwrap();
        let parts = vec![
            AgentPartition::new(0, vec![iv(&g, 0, 0.0, 1.0), iv(&g, 1, 0.0, 1.0)], 0.5),
            AgentPartition::new(1, vec![iv(&g, 0, 1.5, 2.0), iv(&g, 1, 1.5, 2.0)], 0.5),
        ];
        let (alloc, report) = allocate_unicyclic_union(&g, &parts, 0.5).unwrap();
        assert_eq!(report.cyclic_components, 0);
        assert_eq!(alloc, allocate_forest(&g, &parts, 0.5).unwrap());
    }

    #[test]
    fn one_cycle_one_tree_two_agents() {
        // triangle of side 1 plus a path of length 3
        let g = MetricGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (3, 4, 3.0)]).unwrap();
        let s = 0.5;
        let parts = vec![
            AgentPartition::new(0, vec![iv(&g, 0, 0.2, 0.4), iv(&g, 3, 0.0, 1.0), iv(&g, 3, 2.0, 3.0)], s),
            AgentPartition::new(1, vec![iv(&g, 1, 0.2, 0.4), iv(&g, 3, 0.0, 0.5), iv(&g, 3, 1.5, 3.0)], s),
        ];
        let (alloc, report) = allocate_unicyclic_union(&g, &parts, s).unwrap();
        assert_eq!(report.required_parts, 3);
        assert_eq!(alloc.pieces.len(), 2);
        let report = verify_allocation(&g, &alloc, s, IntersectionMode::Disjoint, Some(&parts), None, None);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn both_agents_on_one_cycle() {
        // square cycle of side 1
        let g = MetricGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
        let s = 0.5;
        let parts = vec![
            AgentPartition::new(0, vec![iv(&g, 0, 0.1, 0.3), iv(&g, 1, 0.1, 0.3), iv(&g, 2, 0.1, 0.3)], s),
            AgentPartition::new(1, vec![iv(&g, 0, 0.6, 0.8), iv(&g, 1, 0.6, 0.8), iv(&g, 2, 0.6, 0.8)], s),
        ];
        let (alloc, report) = allocate_unicyclic_union(&g, &parts, s).unwrap();
        assert_eq!(report.decomposition.x_small, vec![0, 1]);
        assert_eq!(report.decomposition.y_small, vec![0]);
        assert_eq!(report.residual_demand, 3);
        let v = verify_allocation(&g, &alloc, s, IntersectionMode::Disjoint, Some(&parts), None, None);
        assert!(v.passed, "{v:?}");
    }

    #[test]
    fn rejects_components_with_two_cycles() {
        let g = MetricGraph::from_edges(&[(0, 1, 1.0), (0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(allocate_unicyclic_union(&g, &[], 0.5), Err(Error::Precondition(_))));
    }
}
