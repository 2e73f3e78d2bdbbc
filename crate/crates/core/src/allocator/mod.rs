//! Turning one partition per agent into a separated allocation.
//!
//! Every allocator consumes [`AgentPartition`]s and never looks at
//! valuations: an agent whose partition is a maximin partition is guaranteed
//! her maximin share because she receives (a superset of) one of her parts.

mod bipartite;
mod forest;
mod general;
mod unicyclic;
mod verify;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric_graph::{MetricGraph, Piece};
use crate::TOLERANCE;

pub use bipartite::{bipartite_decompose, BipartiteDecomposition, BipartiteGraph};
pub use forest::allocate_forest;
pub use general::allocate_general;
pub use unicyclic::{allocate_unicyclic_union, UnicyclicReport};
pub use verify::{verify_allocation, verify_partition, CheckKind, Failure, VerificationReport, Witness};

/// Whether pieces at separation zero may share finitely many points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntersectionMode {
    #[default]
    Disjoint,
    FiniteOverlap,
}

/// One agent's family of connected, pairwise separated parts.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentPartition {
    pub agent: usize,
    pub parts: Vec<Piece>,
    pub separation: f64,
    pub mode: IntersectionMode,
}

impl AgentPartition {
    pub fn new(agent: usize, parts: Vec<Piece>, separation: f64) -> AgentPartition {
        AgentPartition {
            agent,
            parts,
            separation,
            mode: IntersectionMode::Disjoint,
        }
    }

    fn invalid(&self, reason: impl Into<String>) -> Error {
        Error::InvalidPartition {
            agent: self.agent,
            reason: reason.into(),
        }
    }

    /// Checks the partition against `g` at its declared separation. With a
    /// positive separation parts are compared through their closures.
    pub fn validate(&self, g: &MetricGraph) -> Result<()> {
        let s = self.separation;
        if !(s >= 0.0 && s.is_finite()) {
            return Err(self.invalid(format!("separation {s} must be finite and nonnegative")));
        }
        let parts = if s > 0.0 {
            self.parts.iter().map(|p| p.closure(g)).collect()
        } else {
            self.parts.clone()
        };
        for (j, p) in parts.iter().enumerate() {
            if p.is_empty() {
                return Err(self.invalid(format!("part {j} is empty")));
            }
            g.check_piece(p).map_err(|e| self.invalid(format!("part {j}: {e}")))?;
            if !g.is_connected_piece(p) {
                return Err(self.invalid(format!("part {j} is not connected")));
            }
        }
        for a in 0..parts.len() {
            for b in a + 1..parts.len() {
                let ok = if s > 0.0 {
                    g.piece_distance(&parts[a], &parts[b])?.value() >= s - TOLERANCE
                } else {
                    match self.mode {
                        IntersectionMode::Disjoint => !parts[a].intersects(&parts[b]),
                        IntersectionMode::FiniteOverlap => parts[a].intersection_is_finite(&parts[b]),
                    }
                };
                if !ok {
                    return Err(self.invalid(format!("parts {a} and {b} are not separated")));
                }
            }
        }
        Ok(())
    }

    /// Validated copy at separation `s`, parts closed when `s > 0`.
    pub(crate) fn prepared(&self, g: &MetricGraph, s: f64) -> Result<AgentPartition> {
        if self.mode != IntersectionMode::Disjoint {
            return Err(self.invalid("allocators accept only disjoint partitions"));
        }
        let mut p = self.clone();
        p.separation = s;
        if s > 0.0 {
            p.parts = p.parts.iter().map(|x| x.closure(g)).collect();
        }
        p.validate(g)?;
        Ok(p)
    }
}

/// A piece handed to an agent.
#[derive(Clone, Debug, PartialEq)]
pub struct AllocatedPiece {
    pub agent: usize,
    pub piece: Piece,
    /// Index of one of the agent's parts contained in the piece.
    pub contains_part: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Allocation {
    pub separation: f64,
    pub pieces: Vec<AllocatedPiece>,
}

impl Allocation {
    pub fn piece_of(&self, agent: usize) -> Option<&AllocatedPiece> {
        self.pieces.iter().find(|p| p.agent == agent)
    }
}

pub(crate) fn check_agents(partitions: &[AgentPartition]) -> Result<()> {
    let mut ids: Vec<usize> = partitions.iter().map(|p| p.agent).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameters("duplicate agent id".into()));
    }
    Ok(())
}

pub(crate) fn require_parts(partitions: &[AgentPartition], need: usize) -> Result<()> {
    for p in partitions {
        if p.parts.len() < need {
            return Err(Error::TooFewParts {
                agent: p.agent,
                have: p.parts.len(),
                need,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_graph::{EdgeId, IntervalOnEdge};

    #[test]
    fn validation_catches_close_parts() {
        let g = MetricGraph::from_edges(&[(0, 1, 1.0)]).unwrap();
        let a = Piece::closed_interval(&g, EdgeId(0), 0.0, 0.4).unwrap();
        let b = Piece::closed_interval(&g, EdgeId(0), 0.5, 1.0).unwrap();
        assert!(AgentPartition::new(0, vec![a.clone(), b.clone()], 0.1).validate(&g).is_ok());
        assert!(AgentPartition::new(0, vec![a.clone(), b.clone()], 0.2).validate(&g).is_err());
        let c = Piece::closed_interval(&g, EdgeId(0), 0.4, 1.0).unwrap();
        assert!(AgentPartition::new(0, vec![a.clone(), c.clone()], 0.0).validate(&g).is_err());
        let mut overlap = AgentPartition::new(0, vec![a, c], 0.0);
        overlap.mode = IntersectionMode::FiniteOverlap;
        assert!(overlap.validate(&g).is_ok());
        let open = Piece::from_interval(&g, IntervalOnEdge::with_flags(EdgeId(0), 0.4, 1.0, false, true)).unwrap();
        let half = Piece::closed_interval(&g, EdgeId(0), 0.0, 0.4).unwrap();
        assert!(AgentPartition::new(0, vec![half, open], 0.0).validate(&g).is_ok());
    }
}
