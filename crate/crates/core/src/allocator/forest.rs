use super::{check_agents, require_parts, AgentPartition, AllocatedPiece, Allocation};
use crate::error::{Error, Result};
use crate::good_piece::{find_s_good_rooted, find_zero_good};
use crate::metric_graph::{MetricGraph, Piece};
use crate::TOLERANCE;

struct Survivor {
    agent_pos: usize,
    part: usize,
    piece: Piece,
    tree: usize,
}

fn conflicts(g: &MetricGraph, a: &Piece, b: &Piece, s: f64) -> Result<bool> {
    if s > 0.0 {
        Ok(g.piece_distance(a, b)?.value() < s - TOLERANCE)
    } else {
        Ok(a.intersects(b))
    }
}

/// Allocates one intact part to every agent on a forest.
///
/// Repeatedly takes the tree holding the smallest surviving `(agent, part)`,
/// selects a good part among all unserved agents' surviving parts in that
/// tree, hands it out and discards the parts of other agents that meet it
/// (`s = 0`) or come closer than `s` to it. Each agent loses at most one
/// part per round, so partitions with at least `n` parts always suffice.
pub fn allocate_forest(g: &MetricGraph, partitions: &[AgentPartition], s: f64) -> Result<Allocation> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameters(format!("separation {s} must be finite and nonnegative")));
    }
    if !g.is_forest() {
        return Err(Error::NotAForest);
    }
    check_agents(partitions)?;
    let n = partitions.len();
    require_parts(partitions, n)?;
    let prepared: Vec<AgentPartition> = partitions.iter().map(|p| p.prepared(g, s)).collect::<Result<_>>()?;
    let trees = g.components();
    let mut survivors: Vec<Survivor> = Vec::new();
    for (pos, p) in prepared.iter().enumerate() {
        for (j, piece) in p.parts.iter().enumerate() {
            let tree = trees
                .iter()
                .position(|t| piece.is_subset(t))
                .ok_or_else(|| Error::InvalidPartition {
                    agent: p.agent,
                    reason: format!("part {j} is not inside one component"),
                })?;
            survivors.push(Survivor {
                agent_pos: pos,
                part: j,
                piece: piece.clone(),
                tree,
            });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| prepared[i].agent);
    let mut served = vec![false; n];
    let mut pieces = Vec::with_capacity(n);
    for round in 0..n {
        let unserved: Vec<usize> = order.iter().copied().filter(|&i| !served[i]).collect();
        for &i in &unserved {
            if !survivors.iter().any(|x| x.agent_pos == i) {
                return Err(Error::TooFewParts {
                    agent: prepared[i].agent,
                    have: 0,
                    need: n - round,
                });
            }
        }
        let pick = if unserved.len() == 1 {
            survivors
                .iter()
                .position(|x| x.agent_pos == unserved[0])
                .expect("checked above")
        } else {
            let first = survivors
                .iter()
                .enumerate()
                .min_by_key(|(_, x)| (prepared[x.agent_pos].agent, x.part))
                .map(|(i, _)| i)
                .expect("unserved agents have survivors");
            let tree = survivors[first].tree;
            let mut members: Vec<usize> = (0..survivors.len()).filter(|&i| survivors[i].tree == tree).collect();
            members.sort_by_key(|&i| (prepared[survivors[i].agent_pos].agent, survivors[i].part));
            let family: Vec<Piece> = members.iter().map(|&i| survivors[i].piece.clone()).collect();
            let j = if s > 0.0 {
                find_s_good_rooted(g, &family, s, None, false)?.0
            } else {
                find_zero_good(g, &family)?
            };
            members[j]
        };
        let chosen = survivors.swap_remove(pick);
        served[chosen.agent_pos] = true;
        let mut lost = vec![0usize; n];
        let mut keep = Vec::with_capacity(survivors.len());
        for x in survivors.drain(..) {
            if x.agent_pos == chosen.agent_pos {
                continue;
            }
            if conflicts(g, &x.piece, &chosen.piece, s)? {
                lost[x.agent_pos] += 1;
            } else {
                keep.push(x);
            }
        }
        survivors = keep;
        if let Some(i) = (0..n).find(|&i| lost[i] > 1) {
            return Err(Error::Invariant(format!(
                "agent {} lost {} parts to a single allocated piece",
                prepared[i].agent, lost[i]
            )));
        }
        survivors.sort_by_key(|x| (prepared[x.agent_pos].agent, x.part));
        pieces.push(AllocatedPiece {
            agent: prepared[chosen.agent_pos].agent,
            piece: chosen.piece,
            contains_part: Some(chosen.part),
        });
    }
    pieces.sort_by_key(|p| p.agent);
    Ok(Allocation { separation: s, pieces })
}
