use super::{Method, MmsResult};
use crate::allocator::AgentPartition;
use crate::error::{Error, Result};
use crate::metric_graph::{EdgeId, IntervalOnEdge, MetricGraph, Piece, VertexId};
use crate::valuation::Valuation;

/// A path cake laid out on `[0, total]`, starting at its smallest-id end.
pub(crate) struct Line {
    /// `(edge, reversed, start coordinate, length)` in path order.
    segs: Vec<(EdgeId, bool, f64, f64)>,
    total: f64,
}

impl Line {
    pub fn new(g: &MetricGraph) -> Result<Line> {
        let not_path = || Error::Precondition("graph is not a path".into());
        if !g.is_pristine() || !g.is_forest() || g.components().len() != 1 {
            return Err(not_path());
        }
        if g.vertices().iter().any(|&v| g.incident(v).len() > 2) {
            return Err(not_path());
        }
        let start: VertexId = *g
            .vertices()
            .iter()
            .find(|&&v| g.incident(v).len() == 1)
            .ok_or_else(not_path)?;
        let mut segs = Vec::new();
        let mut at = start;
        let mut prev: Option<EdgeId> = None;
        let mut x = 0.0;
        loop {
            let next = g.incident(at).iter().copied().find(|&e| Some(e) != prev);
            let Some(e) = next else { break };
            let edge = g.edge(e)?;
            let reversed = edge.v == at;
            segs.push((e, reversed, x, edge.length));
            x += edge.length;
            at = if reversed { edge.u } else { edge.v };
            prev = Some(e);
        }
        Ok(Line { segs, total: x })
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Value of `[x0, x1]`.
    pub fn value(&self, v: &Valuation, x0: f64, x1: f64) -> f64 {
        self.segs
            .iter()
            .map(|&(e, rev, a, len)| {
                let lo = (x0 - a).clamp(0.0, len);
                let hi = (x1 - a).clamp(0.0, len);
                if hi <= lo {
                    0.0
                } else if rev {
                    v.integral(e, len - hi, len - lo)
                } else {
                    v.integral(e, lo, hi)
                }
            })
            .sum()
    }

    /// First coordinate after `from` at which `[from, x]` is worth `t`.
    pub fn cut(&self, v: &Valuation, from: f64, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(from);
        }
        let mut need = t;
        for &(e, rev, a, len) in &self.segs {
            if a + len <= from {
                continue;
            }
            let local = (from - a).max(0.0);
            let rest = if rev {
                v.integral(e, 0.0, len - local)
            } else {
                v.integral(e, local, len)
            };
            if rest >= need {
                let off = if rev {
                    v.cut_at_value(e, len - local, -1, need).map(|o| len - o)
                } else {
                    v.cut_at_value(e, local, 1, need)
                };
                if let Some(off) = off {
                    return Some(a + off);
                }
            }
            need -= rest;
        }
        None
    }

    /// The stretch `[x0, x1]` as a piece, each end closed or open as asked.
    pub fn piece(&self, g: &MetricGraph, x0: f64, x1: f64, closed_start: bool, closed_end: bool) -> Result<Piece> {
        let mut ivs = Vec::new();
        for &(e, rev, a, len) in &self.segs {
            let lo = (x0 - a).clamp(0.0, len);
            let hi = (x1 - a).clamp(0.0, len);
            let touches = if x0 == x1 { lo == x0 - a } else { hi > lo };
            if !touches {
                continue;
            }
            let cs = if a + lo == x0 { closed_start } else { true };
            let ce = if a + hi == x1 { closed_end } else { true };
            let iv = if rev {
                IntervalOnEdge::with_flags(e, len - hi, len - lo, ce, cs)
            } else {
                IntervalOnEdge::with_flags(e, lo, hi, cs, ce)
            };
            ivs.push(iv);
            if x0 == x1 {
                break;
            }
        }
        Piece::from_intervals(g, &ivs)
    }
}

/// Greedy feasibility: cut `k - 1` pieces worth `t` from the left, each
/// followed by a gap of length `s`; the last piece takes the rest.
fn greedy(line: &Line, v: &Valuation, k: usize, s: f64, t: f64) -> Option<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(k);
    let mut pos = 0.0;
    for _ in 0..k - 1 {
        let end = line.cut(v, pos, t)?;
        out.push((pos, end));
        pos = end + s;
        if pos > line.total() {
            return None;
        }
    }
    if line.value(v, pos, line.total()) < t {
        return None;
    }
    out.push((pos, line.total()));
    Some(out)
}

fn to_partition(g: &MetricGraph, line: &Line, stretches: &[(f64, f64)], s: f64) -> Result<AgentPartition> {
    let k = stretches.len();
    let parts = stretches
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let closed_end = s > 0.0 || i + 1 == k;
            line.piece(g, a, b, true, closed_end)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AgentPartition::new(0, parts, s))
}

/// Equal-length stretches separated by gaps of `s`, for worthless cakes.
fn by_length(line: &Line, k: usize, s: f64) -> Option<Vec<(f64, f64)>> {
    let len = (line.total() - (k - 1) as f64 * s) / k as f64;
    if len < 0.0 || (s == 0.0 && len <= 0.0) {
        return None;
    }
    Some(
        (0..k)
            .map(|i| {
                let a = i as f64 * (len + s);
                let b = if i + 1 == k { line.total() } else { a + len };
                (a, b)
            })
            .collect(),
    )
}

/// Exact maximin share on a path by binary search over the target value with
/// greedy feasibility.
pub fn mms_path_exact(v: &Valuation, g: &MetricGraph, k: usize, s: f64) -> Result<MmsResult> {
    if k == 0 {
        return Err(Error::InvalidParameters("k must be positive".into()));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameters(format!("separation {s} must be finite and nonnegative")));
    }
    let line = Line::new(g)?;
    let total = line.value(v, 0.0, line.total());
    let mut lo_witness = None;
    let mut hi = total / k as f64;
    if hi > 0.0 {
        if let Some(w) = greedy(&line, v, k, s, hi) {
            lo_witness = Some(w);
        } else {
            let mut lo = 0.0;
            for _ in 0..60 {
                if hi - lo <= 1e-12 * hi.max(1.0) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                match greedy(&line, v, k, s, mid) {
                    Some(w) => {
                        lo = mid;
                        lo_witness = Some(w);
                    }
                    None => hi = mid,
                }
            }
        }
    }
    let stretches = match lo_witness {
        Some(w) => w,
        None => by_length(&line, k, s).ok_or(Error::NoPartition { k })?,
    };
    let partition = to_partition(g, &line, &stretches, s)?;
    let value = partition
        .parts
        .iter()
        .map(|p| v.piece_value(p))
        .fold(f64::INFINITY, f64::min);
    Ok(MmsResult {
        value,
        partition,
        method: Method::PathExact,
        resolution: None,
    })
}
