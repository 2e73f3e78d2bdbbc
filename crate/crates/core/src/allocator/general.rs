use std::collections::BTreeSet;

use super::{allocate_forest, check_agents, require_parts, AgentPartition, Allocation};
use crate::error::{Error, Result};
use crate::metric_graph::{IntervalOnEdge, MetricGraph, Piece, VertexId};
use crate::TOLERANCE;

/// The material cut away around each vertex of `fvs` at separation `s`: the
/// vertex itself and the open stub of length `s / 2` on every incident edge.
fn stubs(g: &MetricGraph, fvs: &BTreeSet<VertexId>, s: f64) -> Result<Vec<Piece>> {
    let mut out = Vec::new();
    for &v in fvs {
        let mut around = Piece::vertex(v);
        for &e in g.incident(v) {
            let edge = g.edge(e)?;
            let iv = if edge.u == v {
                IntervalOnEdge::open(e, 0.0, 0.5 * s)
            } else {
                IntervalOnEdge::open(e, edge.length - 0.5 * s, edge.length)
            };
            around = around.union(&Piece::from_interval(g, iv)?);
        }
        out.push(around.intersection(g.live()));
    }
    Ok(out)
}

/// Reduces a general graph to a forest through a minimum feedback vertex set
/// and allocates there.
///
/// At `s = 0` the set's vertices are deleted and every part containing one is
/// dropped. At `s > 0` an open stub of length `s / 2` is also cut from every
/// incident edge; the removed set around one vertex has diameter below `s`,
/// so each agent loses at most one part per vertex. Partitions therefore need
/// `n + |fvs|` parts. The result is re-checked for separation in `g` itself.
pub fn allocate_general(g: &MetricGraph, partitions: &[AgentPartition], s: f64) -> Result<Allocation> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameters(format!("separation {s} must be finite and nonnegative")));
    }
    check_agents(partitions)?;
    let fvs = g.fvs();
    let n = partitions.len();
    require_parts(partitions, n + fvs.len())?;
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
    if fvs.is_empty() {
        return allocate_forest(g, &prepared, s);
    }
    let removed: Vec<Piece> = if s > 0.0 {
        stubs(g, &fvs, s)?
    } else {
        fvs.iter().map(|&v| Piece::vertex(v)).collect()
    };
    let mut reduced_graph = g.clone();
    for r in &removed {
        reduced_graph = reduced_graph.subtract(r);
    }
    let reduced: Vec<AgentPartition> = prepared
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.parts = p
                .parts
                .iter()
                .filter(|part| !removed.iter().any(|r| part.intersects(r)))
                .cloned()
                .collect();
            for r in &removed {
                let hit = p.parts.iter().filter(|part| part.intersects(r)).count();
                if hit > 1 {
                    return Err(Error::Invariant(format!(
                        "agent {} has {hit} parts meeting the material removed around one vertex",
                        p.agent
                    )));
                }
            }
            Ok(q)
        })
        .collect::<Result<_>>()?;
    let forest_alloc = allocate_forest(&reduced_graph, &reduced, s)?;
    let mut alloc = forest_alloc;
    for piece in alloc.pieces.iter_mut() {
        let p = prepared.iter().find(|p| p.agent == piece.agent).expect("agent exists");
        let reduced_p = reduced.iter().find(|p| p.agent == piece.agent).expect("agent exists");
        piece.contains_part = piece
            .contains_part
            .and_then(|j| p.parts.iter().position(|x| *x == reduced_p.parts[j]));
    }
    for a in 0..alloc.pieces.len() {
        for b in a + 1..alloc.pieces.len() {
            let (x, y) = (&alloc.pieces[a].piece, &alloc.pieces[b].piece);
            let ok = if s > 0.0 {
                g.piece_distance(x, y)?.value() >= s - TOLERANCE
            } else {
                !x.intersects(y)
            };
            if !ok {
                return Err(Error::Invariant(format!(
                    "agents {} and {} are not separated in the original graph",
                    alloc.pieces[a].agent, alloc.pieces[b].agent
                )));
            }
        }
    }
    Ok(alloc)
}
