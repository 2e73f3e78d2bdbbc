//! Additive valuations with piecewise-constant density on each edge.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metric_graph::{EdgeId, MetricGraph, Piece};
use crate::TOLERANCE;

/// Constant density on `[start, end]` of one edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensitySegment {
    pub start: f64,
    pub end: f64,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq)]
struct EdgeDensity {
    length: f64,
    segments: Vec<DensitySegment>,
}

/// Uncovered stretches of an edge have density zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Valuation {
    edges: BTreeMap<EdgeId, EdgeDensity>,
}

impl Valuation {
    /// Builds a valuation from `(edge, [(start, end, density)])` lists.
    pub fn new(g: &MetricGraph, per_edge: &[(EdgeId, Vec<(f64, f64, f64)>)]) -> Result<Valuation> {
        let mut edges: BTreeMap<EdgeId, EdgeDensity> = g
            .edges()
            .iter()
            .map(|e| {
                (
                    e.id,
                    EdgeDensity {
                        length: e.length,
                        segments: Vec::new(),
                    },
                )
            })
            .collect();
        for (eid, segs) in per_edge {
            let entry = edges.get_mut(eid).ok_or(Error::UnknownEdge(*eid))?;
            let len = entry.length;
            for &(a, b, d) in segs {
                if !(a.is_finite() && b.is_finite() && d.is_finite()) || d < 0.0 {
                    return Err(Error::InvalidValuation(format!(
                        "segment [{a}, {b}] density {d} on edge {eid} is not finite and nonnegative"
                    )));
                }
                if a < -TOLERANCE || b > len + TOLERANCE || a >= b {
                    return Err(Error::InvalidValuation(format!(
                        "segment [{a}, {b}] does not fit edge {eid} of length {len}"
                    )));
                }
                entry.segments.push(DensitySegment {
                    start: a.max(0.0),
                    end: b.min(len),
                    density: d,
                });
            }
            entry.segments.sort_by(|x, y| x.start.total_cmp(&y.start));
            for w in entry.segments.windows(2) {
                if w[1].start < w[0].end - TOLERANCE {
                    return Err(Error::InvalidValuation(format!("overlapping segments on edge {eid}")));
                }
            }
        }
        Ok(Valuation { edges })
    }

    pub fn uniform(g: &MetricGraph, density: f64) -> Result<Valuation> {
        let per_edge: Vec<_> = g
            .edges()
            .iter()
            .map(|e| (e.id, vec![(0.0, e.length, density)]))
            .collect();
        Valuation::new(g, &per_edge)
    }

    pub fn zero(g: &MetricGraph) -> Valuation {
        Valuation::new(g, &[]).expect("empty valuation is valid")
    }

    /// Declared segments on `e` (zero-density gaps omitted).
    pub fn segments(&self, e: EdgeId) -> &[DensitySegment] {
        self.edges.get(&e).map(|d| d.segments.as_slice()).unwrap_or(&[])
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    /// Value of the stretch `[a, b]` of edge `e`.
    pub fn integral(&self, e: EdgeId, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.segments(e)
            .iter()
            .map(|s| (b.min(s.end) - a.max(s.start)).max(0.0) * s.density)
            .sum()
    }

    pub fn piece_value(&self, a: &Piece) -> f64 {
        a.edges()
            .map(|e| {
                a.spans_on(e)
                    .iter()
                    .map(|s| self.integral(e, s.start, s.end))
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn total_value(&self) -> f64 {
        self.edges
            .values()
            .flat_map(|d| d.segments.iter())
            .map(|s| (s.end - s.start) * s.density)
            .sum()
    }

    pub fn max_density(&self) -> f64 {
        self.edges
            .values()
            .flat_map(|d| d.segments.iter())
            .map(|s| s.density)
            .fold(0.0, f64::max)
    }

    /// Walking from `from` in `direction` (`+1` toward the edge end, `-1`
    /// toward its start), the first offset at which the traversed stretch is
    /// worth exactly `t`; `None` when the rest of the edge is worth less.
    pub fn cut_at_value(&self, e: EdgeId, from: f64, direction: i8, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(from);
        }
        let mut need = t;
        if direction >= 0 {
            for s in self.segments(e).iter().filter(|s| s.end > from) {
                let a = s.start.max(from);
                let worth = (s.end - a) * s.density;
                if s.density > 0.0 && worth >= need {
                    return Some((a + need / s.density).min(s.end));
                }
                need -= worth;
            }
        } else {
            for s in self.segments(e).iter().rev().filter(|s| s.start < from) {
                let b = s.end.min(from);
                let worth = (b - s.start) * s.density;
                if s.density > 0.0 && worth >= need {
                    return Some((b - need / s.density).max(s.start));
                }
                need -= worth;
            }
        }
        if need <= TOLERANCE * t.max(1.0) {
            // accumulated rounding: the whole remainder was consumed
            let segs = self.segments(e);
            return if direction >= 0 {
                segs.iter().rev().find(|s| s.density > 0.0).map(|s| s.end)
            } else {
                segs.iter().find(|s| s.density > 0.0).map(|s| s.start)
            };
        }
        None
    }

    /// Sorted segment boundaries on `e`, including both edge ends.
    pub fn breakpoints(&self, e: EdgeId) -> Vec<f64> {
        let Some(d) = self.edges.get(&e) else {
            return Vec::new();
        };
        let mut pts = vec![0.0, d.length];
        for s in &d.segments {
            pts.push(s.start);
            pts.push(s.end);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Merged breakpoints of several valuations on `e`.
    pub fn merged_breakpoints<'a>(vals: impl IntoIterator<Item = &'a Valuation>, e: EdgeId) -> Vec<f64> {
        let mut pts: Vec<f64> = vals.into_iter().flat_map(|v| v.breakpoints(e)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Shortest positive-length segment, zero-density gaps included.
    pub(crate) fn shortest_feature(&self) -> f64 {
        self.edges
            .keys()
            .flat_map(|&e| {
                let b = self.breakpoints(e);
                b.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>()
            })
            .filter(|&x| x > 0.0)
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> MetricGraph {
        MetricGraph::from_edges(&[(0, 1, 1.0)]).unwrap()
    }

    fn two_step(g: &MetricGraph) -> Valuation {
        Valuation::new(g, &[(EdgeId(0), vec![(0.0, 0.5, 1.0), (0.5, 1.0, 3.0)])]).unwrap()
    }

    #[test]
    fn piece_values() {
        let g = unit();
        let u = Valuation::uniform(&g, 1.0).unwrap();
        let a = Piece::closed_interval(&g, EdgeId(0), 0.2, 0.7).unwrap();
        assert!((u.piece_value(&a) - 0.5).abs() < 1e-12);
        assert_eq!(u.piece_value(&Piece::closed_interval(&g, EdgeId(0), 0.3, 0.3).unwrap()), 0.0);
        let v = two_step(&g);
        let b = Piece::closed_interval(&g, EdgeId(0), 0.25, 0.75).unwrap();
        assert!((v.piece_value(&b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn totals() {
        let g = unit();
        assert_eq!(Valuation::uniform(&g, 1.0).unwrap().total_value(), 1.0);
        assert_eq!(Valuation::zero(&g).total_value(), 0.0);
    }

    #[test]
    fn cuts() {
        let g = unit();
        let u = Valuation::uniform(&g, 1.0).unwrap();
        assert!((u.cut_at_value(EdgeId(0), 0.0, 1, 0.4).unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(u.cut_at_value(EdgeId(0), 0.3, 1, 0.0), Some(0.3));
        assert_eq!(u.cut_at_value(EdgeId(0), 0.5, 1, 0.6), None);
        assert!((u.cut_at_value(EdgeId(0), 1.0, -1, 0.25).unwrap() - 0.75).abs() < 1e-12);
        let v = two_step(&g);
        assert!((v.cut_at_value(EdgeId(0), 0.0, 1, 1.25).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn cut_skips_zero_density_gaps() {
        let g = unit();
        let v = Valuation::new(&g, &[(EdgeId(0), vec![(0.6, 0.8, 5.0)])]).unwrap();
        assert!((v.cut_at_value(EdgeId(0), 0.0, 1, 0.5).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn breakpoint_sets() {
        let g = unit();
        let u = Valuation::uniform(&g, 1.0).unwrap();
        assert_eq!(u.breakpoints(EdgeId(0)), vec![0.0, 1.0]);
        let v = two_step(&g);
        assert_eq!(v.breakpoints(EdgeId(0)), vec![0.0, 0.5, 1.0]);
        let w = Valuation::new(&g, &[(EdgeId(0), vec![(0.0, 0.3, 1.0)])]).unwrap();
        assert_eq!(Valuation::merged_breakpoints([&v, &w], EdgeId(0)), vec![0.0, 0.3, 0.5, 1.0]);
    }

    #[test]
    fn rejects_bad_segments() {
        let g = unit();
        assert!(Valuation::new(&g, &[(EdgeId(0), vec![(0.0, 2.0, 1.0)])]).is_err());
        assert!(Valuation::new(&g, &[(EdgeId(0), vec![(0.0, 0.5, -1.0)])]).is_err());
        assert!(Valuation::new(&g, &[(EdgeId(0), vec![(0.0, 0.6, 1.0), (0.5, 1.0, 1.0)])]).is_err());
        assert!(Valuation::new(&g, &[(EdgeId(3), vec![])]).is_err());
    }
}
