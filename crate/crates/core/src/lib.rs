//! Maximin-share division of graphical cakes.
//!
//! The cake is a [`MetricGraph`]; agents value it through additive
//! piecewise-constant [`Valuation`]s and submit partitions of it. The
//! allocators turn one partition per agent into a connected, pairwise
//! separated allocation in which every agent keeps (or contains) one of her
//! own parts, which yields maximin-share guarantees for forests and for
//! general graphs via feedback vertex sets.

pub mod error;
pub mod allocator;
pub mod cli;
pub mod good_piece;
pub mod instances;
pub mod metric_graph;
pub mod mms;
pub mod valuation;

pub use error::{Error, Result};
pub use valuation::Valuation;
pub use metric_graph::{Edge, EdgeId, GraphDistance, IntervalOnEdge, MetricGraph, Piece, PointRef, VertexId};

/// Absolute tolerance for comparing lengths, offsets and values.
pub const TOLERANCE: f64 = 1e-9;
