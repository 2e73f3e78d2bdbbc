//! Maximin-share oracles.
//!
//! On a path the share is computed exactly by binary search with a greedy
//! feasibility test. On small general graphs a brute-force search over
//! unions of grid cells gives a witnessed lower bound.

mod discretized;
mod path;

use serde::Serialize;

use crate::allocator::AgentPartition;
use crate::error::Result;
use crate::metric_graph::MetricGraph;
use crate::valuation::Valuation;

pub use discretized::{default_resolution, mms_discretized, mms_discretized_with_budget, DEFAULT_BUDGET};
pub use path::mms_path_exact;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PathExact,
    Discretized,
}

/// A maximin value together with a partition realising it.
#[derive(Clone, Debug, PartialEq)]
pub struct MmsResult {
    /// Minimum part value of `partition`.
    pub value: f64,
    pub partition: AgentPartition,
    pub method: Method,
    /// Grid spacing used by the discretized oracle.
    pub resolution: Option<f64>,
}

/// Best available oracle: exact on paths, discretized with the default
/// resolution elsewhere.
pub fn maximin_share(v: &Valuation, g: &MetricGraph, k: usize, s: f64) -> Result<MmsResult> {
    if path::Line::new(g).is_ok() {
        mms_path_exact(v, g, k, s)
    } else {
        mms_discretized(v, g, k, s, None)
    }
}

/// The witness partition of [`maximin_share`].
pub fn maximin_partition(v: &Valuation, g: &MetricGraph, k: usize, s: f64) -> Result<AgentPartition> {
    maximin_share(v, g, k, s).map(|r| r.partition)
}
