use thiserror::Error;

use crate::metric_graph::{EdgeId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid valuation: {0}")]
    InvalidValuation(String),
    #[error("piece is empty")]
    EmptyPiece,
    #[error("graph (or the component in question) is not a forest")]
    NotAForest,
    #[error("no path between the given points")]
    NoPath,
    #[error("pieces overlap")]
    Overlap,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("edge {edge} has length {length} < separation {separation}")]
    EdgeTooShort {
        edge: EdgeId,
        length: f64,
        separation: f64,
    },
    #[error("agent {agent} has {have} usable parts, needs {need}")]
    TooFewParts { agent: usize, have: usize, need: usize },
    #[error("invalid partition for agent {agent}: {reason}")]
    InvalidPartition { agent: usize, reason: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("search budget of {0} steps exceeded")]
    BudgetExceeded(u64),
    #[error("no valid partition into {k} parts exists at this resolution")]
    NoPartition { k: usize },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}
