//! Instance documents, their canonical JSON form, and generators.
//!
//! JSON output is canonical: object keys sorted, floats printed as the
//! shortest decimal that round-trips, a trailing newline. Parsing and
//! printing a document therefore reproduces it byte for byte.

mod counterexample;
mod positive_bound;
mod random;

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::allocator::{AgentPartition, AllocatedPiece, Allocation, IntersectionMode};
use crate::error::{Error, Result};
use crate::metric_graph::{Edge, EdgeId, IntervalOnEdge, MetricGraph, Piece, VertexId};
use crate::mms::{Method, MmsResult};
use crate::valuation::Valuation;

pub use counterexample::gen_cycle_counterexample;
pub use positive_bound::check_positive_value_bound;
pub use random::{
    gen_random_forest_instance, random_connected_piece, random_forest, random_graph_with_small_fvs, random_partition,
    random_point, random_tree, random_unicyclic_union, random_valuation,
};

/// Serializes `value` canonically.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let tree = serde_json::to_value(value).map_err(|e| Error::Json(e.to_string()))?;
    let mut out = serde_json::to_string_pretty(&tree).map_err(|e| Error::Json(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

/// Parses JSON; errors carry the line and column of the problem.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityDoc {
    pub edge: EdgeId,
    /// `[start, end, density]` triples.
    pub segments: Vec<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDoc {
    pub name: String,
    pub densities: Vec<DensityDoc>,
    /// Declared parts, each a list of intervals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<IntervalOnEdge>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub separation: f64,
    pub graph: GraphDoc,
    pub agents: Vec<AgentDoc>,
    #[serde(default)]
    pub meta: BTreeMap<String, serde_json::Value>,
}

fn pieces_to_doc(g: &MetricGraph, parts: &[Piece]) -> Vec<Vec<IntervalOnEdge>> {
    parts.iter().map(|p| p.intervals(g)).collect()
}

fn pieces_from_doc(g: &MetricGraph, parts: &[Vec<IntervalOnEdge>]) -> Result<Vec<Piece>> {
    parts.iter().map(|ivs| Piece::from_intervals(g, ivs)).collect()
}

impl InstanceDoc {
    /// Document for `g` with one agent per valuation, named `agent-<i>`.
    pub fn new(g: &MetricGraph, valuations: &[Valuation], separation: f64) -> InstanceDoc {
        let agents = valuations
            .iter()
            .enumerate()
            .map(|(i, v)| AgentDoc {
                name: format!("agent-{i}"),
                densities: v
                    .edge_ids()
                    .filter(|&e| !v.segments(e).is_empty())
                    .map(|e| DensityDoc {
                        edge: e,
                        segments: v.segments(e).iter().map(|s| [s.start, s.end, s.density]).collect(),
                    })
                    .collect(),
                partition: None,
            })
            .collect();
        InstanceDoc {
            separation,
            graph: GraphDoc {
                vertices: g.vertices().to_vec(),
                edges: g.edges().to_vec(),
            },
            agents,
            meta: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<InstanceDoc> {
        from_json(text)
    }

    pub fn graph(&self) -> Result<MetricGraph> {
        MetricGraph::new(self.graph.vertices.clone(), self.graph.edges.clone())
    }

    pub fn valuation(&self, g: &MetricGraph, agent: usize) -> Result<Valuation> {
        let a = self
            .agents
            .get(agent)
            .ok_or_else(|| Error::InvalidParameters(format!("no agent {agent}")))?;
        let per_edge: Vec<(EdgeId, Vec<(f64, f64, f64)>)> = a
            .densities
            .iter()
            .map(|d| (d.edge, d.segments.iter().map(|s| (s[0], s[1], s[2])).collect()))
            .collect();
        Valuation::new(g, &per_edge)
    }

    pub fn valuations(&self, g: &MetricGraph) -> Result<Vec<Valuation>> {
        (0..self.agents.len()).map(|i| self.valuation(g, i)).collect()
    }

    /// The declared partition of `agent`, if any.
    pub fn partition(&self, g: &MetricGraph, agent: usize) -> Result<Option<AgentPartition>> {
        let a = self
            .agents
            .get(agent)
            .ok_or_else(|| Error::InvalidParameters(format!("no agent {agent}")))?;
        a.partition
            .as_ref()
            .map(|parts| Ok(AgentPartition::new(agent, pieces_from_doc(g, parts)?, self.separation)))
            .transpose()
    }

    /// Declared partitions of all agents; every agent must have one.
    pub fn partitions(&self, g: &MetricGraph) -> Result<Vec<AgentPartition>> {
        (0..self.agents.len())
            .map(|i| {
                self.partition(g, i)?
                    .ok_or_else(|| Error::InvalidParameters(format!("agent {i} declares no partition")))
            })
            .collect()
    }

    pub fn set_partition(&mut self, g: &MetricGraph, agent: usize, parts: &[Piece]) {
        self.agents[agent].partition = Some(pieces_to_doc(g, parts));
    }
}

/// One agent's partition as exchanged in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    pub agent: usize,
    pub separation: f64,
    #[serde(default)]
    pub mode: IntersectionMode,
    pub parts: Vec<Vec<IntervalOnEdge>>,
}

impl PartitionDoc {
    pub fn from_partition(g: &MetricGraph, p: &AgentPartition) -> PartitionDoc {
        PartitionDoc {
            agent: p.agent,
            separation: p.separation,
            mode: p.mode,
            parts: pieces_to_doc(g, &p.parts),
        }
    }

    pub fn to_partition(&self, g: &MetricGraph) -> Result<AgentPartition> {
        Ok(AgentPartition {
            agent: self.agent,
            parts: pieces_from_doc(g, &self.parts)?,
            separation: self.separation,
            mode: self.mode,
        })
    }
}

/// A file of partitions, one per agent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionsDoc {
    pub partitions: Vec<PartitionDoc>,
}

impl PartitionsDoc {
    pub fn from_partitions(g: &MetricGraph, ps: &[AgentPartition]) -> PartitionsDoc {
        PartitionsDoc {
            partitions: ps.iter().map(|p| PartitionDoc::from_partition(g, p)).collect(),
        }
    }

    pub fn to_partitions(&self, g: &MetricGraph) -> Result<Vec<AgentPartition>> {
        self.partitions.iter().map(|p| p.to_partition(g)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub agent: usize,
    pub intervals: Vec<IntervalOnEdge>,
    pub contains_part: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationDoc {
    pub s: f64,
    pub pieces: Vec<PieceDoc>,
}

impl AllocationDoc {
    pub fn from_allocation(g: &MetricGraph, a: &Allocation) -> AllocationDoc {
        AllocationDoc {
            s: a.separation,
            pieces: a
                .pieces
                .iter()
                .map(|p| PieceDoc {
                    agent: p.agent,
                    intervals: p.piece.intervals(g),
                    contains_part: p.contains_part,
                })
                .collect(),
        }
    }

    pub fn to_allocation(&self, g: &MetricGraph) -> Result<Allocation> {
        Ok(Allocation {
            separation: self.s,
            pieces: self
                .pieces
                .iter()
                .map(|p| {
                    Ok(AllocatedPiece {
                        agent: p.agent,
                        piece: Piece::from_intervals(g, &p.intervals)?,
                        contains_part: p.contains_part,
                    })
                })
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MmsDoc {
    pub value: f64,
    pub method: Method,
    pub resolution: Option<f64>,
    pub partition: PartitionDoc,
}

impl MmsDoc {
    pub fn from_result(g: &MetricGraph, r: &MmsResult) -> MmsDoc {
        MmsDoc {
            value: r.value,
            method: r.method,
            resolution: r.resolution,
            partition: PartitionDoc::from_partition(g, &r.partition),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (MetricGraph, InstanceDoc) {
        let g = MetricGraph::from_edges(&[(0, 1, 1.5), (1, 2, 0.1)]).unwrap();
        let v = Valuation::new(&g, &[(EdgeId(0), vec![(0.0, 0.3, 1.0 / 3.0)])]).unwrap();
        let mut doc = InstanceDoc::new(&g, &[v.clone(), v], 0.25);
        let part = Piece::closed_interval(&g, EdgeId(0), 0.1, 0.2).unwrap();
        doc.set_partition(&g, 1, &[part]);
        doc.meta.insert("seed".into(), 7.into());
        (g, doc)
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let (_, doc) = sample();
        let text = doc.to_json().unwrap();
        let back = InstanceDoc::from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json().unwrap(), text);
        assert!(text.ends_with("}\n"));
        let agents = text.find("\"agents\"").unwrap();
        let graph = text.find("\"graph\"").unwrap();
        let sep = text.find("\"separation\"").unwrap();
        assert!(agents < graph && graph < sep);
    }

    #[test]
    fn parse_errors_have_positions() {
        let err = InstanceDoc::from_json("{\n  \"separation\": 1,\n  oops\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn partitions_and_valuations_rebuild() {
        let (g, doc) = sample();
        let g2 = doc.graph().unwrap();
        assert_eq!(g2, g);
        let vals = doc.valuations(&g).unwrap();
        assert!((vals[0].total_value() - 0.1).abs() < 1e-12);
        assert!(doc.partition(&g, 0).unwrap().is_none());
        let p = doc.partition(&g, 1).unwrap().unwrap();
        assert_eq!(p.parts.len(), 1);
        assert!(doc.partitions(&g).is_err());
    }
}
