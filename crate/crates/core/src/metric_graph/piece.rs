//! Measurable subsets of the cake.
//!
//! A [`Piece`] stores the point set it denotes rather than the list of
//! intervals it was built from: a set of vertices plus, per edge, sorted
//! disjoint spans of the edge *interior*. A span touching offset `0` or the
//! edge length is always stored open at that end; whether the endpoint vertex
//! belongs to the piece is recorded only in the vertex set. Two pieces are
//! equal exactly when they denote the same point set.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{EdgeId, MetricGraph, PointRef, VertexId};
use crate::error::{Error, Result};
use crate::TOLERANCE;

/// One interval of a piece in edge coordinates, as exchanged in JSON.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalOnEdge {
    pub edge: EdgeId,
    pub start: f64,
    pub end: f64,
    pub closed_start: bool,
    pub closed_end: bool,
}

impl IntervalOnEdge {
    pub fn closed(edge: EdgeId, start: f64, end: f64) -> Self {
        IntervalOnEdge {
            edge,
            start,
            end,
            closed_start: true,
            closed_end: true,
        }
    }

    pub fn open(edge: EdgeId, start: f64, end: f64) -> Self {
        IntervalOnEdge {
            edge,
            start,
            end,
            closed_start: false,
            closed_end: false,
        }
    }

    pub fn with_flags(edge: EdgeId, start: f64, end: f64, closed_start: bool, closed_end: bool) -> Self {
        IntervalOnEdge {
            edge,
            start,
            end,
            closed_start,
            closed_end,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Span {
    pub start: f64,
    pub end: f64,
    pub closed_start: bool,
    pub closed_end: bool,
}

impl Span {
    pub fn new(start: f64, end: f64, closed_start: bool, closed_end: bool) -> Self {
        Span {
            start,
            end,
            closed_start,
            closed_end,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.start > self.end || (self.start == self.end && !(self.closed_start && self.closed_end))
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.start < x && x < self.end)
            || (x == self.start && self.closed_start)
            || (x == self.end && self.closed_end)
    }

    pub fn len(&self) -> f64 {
        (self.end - self.start).max(0.0)
    }

    fn intersect(&self, other: &Span) -> Span {
        let (start, closed_start) = if self.start > other.start {
            (self.start, self.closed_start)
        } else if other.start > self.start {
            (other.start, other.closed_start)
        } else {
            (self.start, self.closed_start && other.closed_start)
        };
        let (end, closed_end) = if self.end < other.end {
            (self.end, self.closed_end)
        } else if other.end < self.end {
            (other.end, other.closed_end)
        } else {
            (self.end, self.closed_end && other.closed_end)
        };
        Span::new(start, end, closed_start, closed_end)
    }
}

/// Sort, drop empties and merge spans that overlap or meet at a point owned by
/// at least one of them.
fn normalize_spans(mut spans: Vec<Span>, length: f64) -> Vec<Span> {
    for s in spans.iter_mut() {
        if s.start <= 0.0 {
            s.start = 0.0;
            s.closed_start = false;
        }
        if s.end >= length {
            s.end = length;
            s.closed_end = false;
        }
    }
    spans.retain(|s| !s.is_empty());
    spans.sort_by(|a, b| {
        a.start
            .total_cmp(&b.start)
            .then_with(|| b.closed_start.cmp(&a.closed_start))
    });
    let mut out: Vec<Span> = Vec::with_capacity(spans.len());
    for s in spans {
        if let Some(cur) = out.last_mut() {
            let touches = s.start < cur.end || (s.start == cur.end && (cur.closed_end || s.closed_start));
            if touches {
                if s.end > cur.end {
                    cur.end = s.end;
                    cur.closed_end = s.closed_end;
                } else if s.end == cur.end {
                    cur.closed_end |= s.closed_end;
                }
                continue;
            }
        }
        out.push(s);
    }
    out
}

fn intersect_lists(a: &[Span], b: &[Span]) -> Vec<Span> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let s = x.intersect(y);
            if !s.is_empty() {
                out.push(s);
            }
        }
    }
    out
}

fn subtract_lists(a: &[Span], b: &[Span]) -> Vec<Span> {
    let mut current: Vec<Span> = a.to_vec();
    for y in b {
        let left = Span::new(f64::NEG_INFINITY, y.start, false, !y.closed_start);
        let right = Span::new(y.end, f64::INFINITY, !y.closed_end, false);
        let mut next = Vec::with_capacity(current.len() + 1);
        for x in &current {
            for half in [&left, &right] {
                let s = x.intersect(half);
                if !s.is_empty() {
                    next.push(s);
                }
            }
        }
        current = next;
    }
    current
}

/// A finite union of intervals on the cake, stored canonically as a point set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Piece {
    pub(crate) vertices: BTreeSet<VertexId>,
    pub(crate) spans: BTreeMap<EdgeId, Vec<Span>>,
}

impl Piece {
    pub fn empty() -> Self {
        Piece::default()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.spans.is_empty()
    }

    /// Builds a piece from intervals, validating them against `g`.
    pub fn from_intervals(g: &MetricGraph, intervals: &[IntervalOnEdge]) -> Result<Piece> {
        let mut vertices = BTreeSet::new();
        let mut raw: BTreeMap<EdgeId, Vec<Span>> = BTreeMap::new();
        for iv in intervals {
            let edge = g.edge(iv.edge)?;
            let len = edge.length;
            if !iv.start.is_finite() || !iv.end.is_finite() {
                return Err(Error::InvalidInterval(format!("non-finite bounds on edge {}", iv.edge)));
            }
            let snap = |x: f64| {
                if x.abs() <= TOLERANCE {
                    0.0
                } else if (x - len).abs() <= TOLERANCE {
                    len
                } else {
                    x
                }
            };
            let (start, end) = (snap(iv.start), snap(iv.end));
            if start < 0.0 || end > len || start > end {
                return Err(Error::InvalidInterval(format!(
                    "[{}, {}] does not fit edge {} of length {}",
                    iv.start, iv.end, iv.edge, len
                )));
            }
            if start == end && !(iv.closed_start && iv.closed_end) {
                return Err(Error::InvalidInterval(format!(
                    "degenerate interval at {} on edge {} must be closed",
                    start, iv.edge
                )));
            }
            if start == 0.0 && iv.closed_start {
                vertices.insert(edge.u);
            }
            if end == len && iv.closed_end {
                vertices.insert(edge.v);
            }
            raw.entry(iv.edge)
                .or_default()
                .push(Span::new(start, end, iv.closed_start, iv.closed_end));
        }
        let mut spans = BTreeMap::new();
        for (e, list) in raw {
            let len = g.edge(e)?.length;
            let list = normalize_spans(list, len);
            if !list.is_empty() {
                spans.insert(e, list);
            }
        }
        Ok(Piece { vertices, spans })
    }

    pub fn from_interval(g: &MetricGraph, interval: IntervalOnEdge) -> Result<Piece> {
        Piece::from_intervals(g, &[interval])
    }

    /// Convenience: closed interval `[start, end]` on `edge`.
    pub fn closed_interval(g: &MetricGraph, edge: EdgeId, start: f64, end: f64) -> Result<Piece> {
        Piece::from_interval(g, IntervalOnEdge::closed(edge, start, end))
    }

    pub fn point(g: &MetricGraph, p: &PointRef) -> Result<Piece> {
        match *p {
            PointRef::Vertex(v) => {
                g.check_vertex(v)?;
                Ok(Piece::vertex(v))
            }
            PointRef::Interior { edge, offset } => {
                Piece::from_interval(g, IntervalOnEdge::closed(edge, offset, offset))
            }
        }
    }

    pub fn vertex(v: VertexId) -> Piece {
        let mut p = Piece::default();
        p.vertices.insert(v);
        p
    }

    /// The whole closed edge, endpoints included.
    pub fn whole_edge(g: &MetricGraph, edge: EdgeId) -> Result<Piece> {
        let len = g.edge(edge)?.length;
        Piece::closed_interval(g, edge, 0.0, len)
    }

    /// Adds raw spans in edge coordinates, normalizing ends at vertices.
    pub(crate) fn add_raw(&mut self, g: &MetricGraph, edge: EdgeId, span: Span) {
        let e = g.edge(edge).expect("edge exists");
        if span.is_empty() {
            return;
        }
        let mut span = span;
        if span.start <= 0.0 {
            span.start = 0.0;
        }
        if span.start == 0.0 && span.closed_start {
            self.vertices.insert(e.u);
        }
        if span.end >= e.length {
            span.end = e.length;
        }
        if span.end == e.length && span.closed_end {
            self.vertices.insert(e.v);
        }
        let list = self.spans.entry(edge).or_default();
        list.push(span);
        let merged = normalize_spans(std::mem::take(list), e.length);
        if merged.is_empty() {
            self.spans.remove(&edge);
        } else {
            *self.spans.get_mut(&edge).unwrap() = merged;
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub(crate) fn spans_on(&self, e: EdgeId) -> &[Span] {
        self.spans.get(&e).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.spans.keys().copied()
    }

    pub fn contains_point(&self, p: &PointRef) -> bool {
        match *p {
            PointRef::Vertex(v) => self.vertices.contains(&v),
            PointRef::Interior { edge, offset } => self.spans_on(edge).iter().any(|s| s.contains(offset)),
        }
    }

    /// Membership of the point at `offset` on `edge`, resolving offsets `0`
    /// and the edge length to the endpoint vertices.
    pub(crate) fn contains_offset(&self, g: &MetricGraph, edge: EdgeId, offset: f64) -> bool {
        let e = g.edge(edge).expect("edge exists");
        if offset == 0.0 {
            self.vertices.contains(&e.u)
        } else if offset == e.length {
            self.vertices.contains(&e.v)
        } else {
            self.spans_on(edge).iter().any(|s| s.contains(offset))
        }
    }

    pub fn union(&self, other: &Piece) -> Piece {
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().copied());
        let mut spans = self.spans.clone();
        for (e, list) in &other.spans {
            let entry = spans.entry(*e).or_default();
            entry.extend(list.iter().copied());
            // lengths are not needed: both inputs are already normalized
            *entry = normalize_spans(std::mem::take(entry), f64::INFINITY);
        }
        Piece { vertices, spans }
    }

    pub fn intersection(&self, other: &Piece) -> Piece {
        let vertices = self.vertices.intersection(&other.vertices).copied().collect();
        let mut spans = BTreeMap::new();
        for (e, a) in &self.spans {
            if let Some(b) = other.spans.get(e) {
                let list = normalize_spans(intersect_lists(a, b), f64::INFINITY);
                if !list.is_empty() {
                    spans.insert(*e, list);
                }
            }
        }
        Piece { vertices, spans }
    }

    pub fn difference(&self, other: &Piece) -> Piece {
        let vertices = self.vertices.difference(&other.vertices).copied().collect();
        let mut spans = BTreeMap::new();
        for (e, a) in &self.spans {
            let list = match other.spans.get(e) {
                Some(b) => normalize_spans(subtract_lists(a, b), f64::INFINITY),
                None => a.clone(),
            };
            if !list.is_empty() {
                spans.insert(*e, list);
            }
        }
        Piece { vertices, spans }
    }

    pub fn intersects(&self, other: &Piece) -> bool {
        !self.intersection(other).is_empty()
    }

    pub fn is_subset(&self, other: &Piece) -> bool {
        self.difference(other).is_empty()
    }

    /// True when the intersection has no interior material (only isolated points).
    pub fn intersection_is_finite(&self, other: &Piece) -> bool {
        let i = self.intersection(other);
        i.spans.values().flatten().all(|s| s.start == s.end)
    }

    /// Total length of the piece.
    pub fn length(&self) -> f64 {
        self.spans.values().flatten().map(Span::len).sum()
    }

    /// Closed pieces contain every endpoint of every span.
    pub fn is_closed(&self, g: &MetricGraph) -> bool {
        self.spans.iter().all(|(e, list)| {
            let edge = g.edge(*e).expect("edge exists");
            list.iter().all(|s| {
                let start_ok = if s.start == 0.0 {
                    self.vertices.contains(&edge.u)
                } else {
                    s.closed_start
                };
                let end_ok = if s.end == edge.length {
                    self.vertices.contains(&edge.v)
                } else {
                    s.closed_end
                };
                start_ok && end_ok
            })
        })
    }

    /// Topological closure in `g`.
    pub fn closure(&self, g: &MetricGraph) -> Piece {
        let mut out = self.clone();
        for (e, list) in out.spans.iter_mut() {
            let edge = g.edge(*e).expect("edge exists");
            for s in list.iter_mut() {
                if s.start == 0.0 {
                    out.vertices.insert(edge.u);
                } else {
                    s.closed_start = true;
                }
                if s.end == edge.length {
                    out.vertices.insert(edge.v);
                } else {
                    s.closed_end = true;
                }
            }
            *list = normalize_spans(std::mem::take(list), edge.length);
        }
        out
    }

    /// Canonical interval list: per-edge sorted spans with ends at included
    /// vertices closed, then lone vertices as degenerate intervals on their
    /// lowest-id incident edge.
    pub fn intervals(&self, g: &MetricGraph) -> Vec<IntervalOnEdge> {
        let mut out = Vec::new();
        let mut touched: BTreeSet<VertexId> = BTreeSet::new();
        for (e, list) in &self.spans {
            let edge = g.edge(*e).expect("edge exists");
            for s in list {
                let closed_start = if s.start == 0.0 {
                    let inside = self.vertices.contains(&edge.u);
                    if inside {
                        touched.insert(edge.u);
                    }
                    inside
                } else {
                    s.closed_start
                };
                let closed_end = if s.end == edge.length {
                    let inside = self.vertices.contains(&edge.v);
                    if inside {
                        touched.insert(edge.v);
                    }
                    inside
                } else {
                    s.closed_end
                };
                out.push(IntervalOnEdge::with_flags(*e, s.start, s.end, closed_start, closed_end));
            }
        }
        for v in &self.vertices {
            if touched.contains(v) {
                continue;
            }
            if let Some(e) = g.incident(*v).first() {
                let edge = g.edge(*e).expect("edge exists");
                let at = if edge.u == *v { 0.0 } else { edge.length };
                out.push(IntervalOnEdge::closed(*e, at, at));
            }
        }
        out
    }

    /// Interior marks (edge, offset) of every span endpoint.
    pub(crate) fn marks(&self) -> impl Iterator<Item = (EdgeId, f64)> + '_ {
        self.spans
            .iter()
            .flat_map(|(e, list)| list.iter().flat_map(move |s| [(*e, s.start), (*e, s.end)]))
    }

    /// Some point of the piece, if any.
    pub fn sample_point(&self) -> Option<PointRef> {
        if let Some(v) = self.vertices.iter().next() {
            return Some(PointRef::Vertex(*v));
        }
        let (e, list) = self.spans.iter().next()?;
        let s = list.first()?;
        Some(PointRef::Interior {
            edge: *e,
            offset: 0.5 * (s.start + s.end),
        })
    }
}
