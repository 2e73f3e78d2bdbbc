//! The cake: a finite undirected graph whose edges are real segments.
//!
//! A [`MetricGraph`] carries its topology plus the *live* material, the part
//! of the cake still present after surgery such as [`MetricGraph::subtract`]
//! or [`MetricGraph::delete_vertices`]. Distances, connectivity and paths are
//! always measured through live material only.

mod fvs;
mod geodesic;
pub(crate) mod net;
mod piece;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::TOLERANCE;

pub use piece::{IntervalOnEdge, Piece};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// An edge of the cake; offsets along it are measured from `u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
}

/// A location on the cake.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointRef {
    Vertex(VertexId),
    Interior { edge: EdgeId, offset: f64 },
}

impl PointRef {
    pub fn interior(edge: EdgeId, offset: f64) -> PointRef {
        PointRef::Interior { edge, offset }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphDistance {
    Finite(f64),
    Infinite,
}

impl GraphDistance {
    pub(crate) fn from_f64(d: f64) -> GraphDistance {
        if d.is_finite() {
            GraphDistance::Finite(d)
        } else {
            GraphDistance::Infinite
        }
    }

    /// The distance as a float, `f64::INFINITY` when infinite.
    pub fn value(self) -> f64 {
        match self {
            GraphDistance::Finite(d) => d,
            GraphDistance::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, GraphDistance::Finite(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    incidence: BTreeMap<VertexId, Vec<EdgeId>>,
    live: Piece,
}

impl MetricGraph {
    /// Builds a graph. Every vertex must be incident to at least one edge;
    /// parallel edges are allowed, self-loops are not.
    pub fn new(vertices: Vec<VertexId>, mut edges: Vec<Edge>) -> Result<MetricGraph> {
        let vset: BTreeSet<VertexId> = vertices.iter().copied().collect();
        if vset.len() != vertices.len() {
            return Err(Error::InvalidGraph("duplicate vertex id".into()));
        }
        edges.sort_by_key(|e| e.id);
        let mut incidence: BTreeMap<VertexId, Vec<EdgeId>> = vset.iter().map(|v| (*v, Vec::new())).collect();
        for (i, e) in edges.iter().enumerate() {
            if i > 0 && edges[i - 1].id == e.id {
                return Err(Error::InvalidGraph(format!("duplicate edge id {}", e.id)));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidGraph(format!("edge {} has non-positive length {}", e.id, e.length)));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("edge {} is a self-loop", e.id)));
            }
            for w in [e.u, e.v] {
                incidence.get_mut(&w).ok_or(Error::UnknownVertex(w))?.push(e.id);
            }
        }
        if let Some((v, _)) = incidence.iter().find(|(_, es)| es.is_empty()) {
            return Err(Error::InvalidGraph(format!("vertex {v} has no incident edge")));
        }
        let mut live = Piece::empty();
        live.vertices = vset.clone();
        for e in &edges {
            live.spans.insert(e.id, vec![piece::Span::new(0.0, e.length, false, false)]);
        }
        Ok(MetricGraph {
            vertices: vset.into_iter().collect(),
            edges,
            incidence,
            live,
        })
    }

    /// Builds a graph from `(u, v, length)` triples; edge ids are the
    /// positions in the slice and vertices are inferred.
    pub fn from_edges(list: &[(u32, u32, f64)]) -> Result<MetricGraph> {
        let vertices: BTreeSet<VertexId> = list.iter().flat_map(|&(u, v, _)| [VertexId(u), VertexId(v)]).collect();
        let edges = list
            .iter()
            .enumerate()
            .map(|(i, &(u, v, length))| Edge {
                id: EdgeId(i as u32),
                u: VertexId(u),
                v: VertexId(v),
                length,
            })
            .collect();
        MetricGraph::new(vertices.into_iter().collect(), edges)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .map(|i| &self.edges[i])
            .map_err(|_| Error::UnknownEdge(id))
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.incidence.contains_key(&v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Edges incident to `v`, by increasing id.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        self.incidence.get(&v).map(|x| x.as_slice()).unwrap_or(&[])
    }

    /// The material still present.
    pub fn live(&self) -> &Piece {
        &self.live
    }

    pub fn is_pristine(&self) -> bool {
        self.live.vertices.len() == self.vertices.len()
            && self.edges.iter().all(|e| {
                self.live.spans_on(e.id) == [piece::Span::new(0.0, e.length, false, false)]
            })
    }

    /// Canonical point at `offset` along `edge`; offsets within tolerance of
    /// an end resolve to the endpoint vertex.
    pub fn point(&self, edge: EdgeId, offset: f64) -> Result<PointRef> {
        let e = self.edge(edge)?;
        if !offset.is_finite() || offset < -TOLERANCE || offset > e.length + TOLERANCE {
            return Err(Error::InvalidPoint(format!("offset {offset} outside edge {edge}")));
        }
        Ok(if offset <= TOLERANCE {
            PointRef::Vertex(e.u)
        } else if offset >= e.length - TOLERANCE {
            PointRef::Vertex(e.v)
        } else {
            PointRef::Interior { edge, offset }
        })
    }

    pub(crate) fn check_point(&self, p: &PointRef) -> Result<()> {
        match *p {
            PointRef::Vertex(v) => self.check_vertex(v)?,
            PointRef::Interior { edge, offset } => {
                let e = self.edge(edge)?;
                if !(offset > 0.0 && offset < e.length) {
                    return Err(Error::InvalidPoint(format!(
                        "offset {offset} is not strictly inside edge {edge}"
                    )));
                }
            }
        }
        if !self.live.contains_point(p) {
            return Err(Error::InvalidPoint(format!("{p:?} is not on live material")));
        }
        Ok(())
    }

    pub(crate) fn check_piece(&self, a: &Piece) -> Result<()> {
        for e in a.edges() {
            self.edge(e)?;
        }
        for v in a.vertices() {
            self.check_vertex(v)?;
        }
        if !a.is_subset(&self.live) {
            return Err(Error::InvalidPoint("piece is not contained in live material".into()));
        }
        Ok(())
    }

    /// Removes `a` from the live material.
    pub fn subtract(&self, a: &Piece) -> MetricGraph {
        let mut g = self.clone();
        g.live = self.live.difference(a);
        g
    }

    /// Keeps only the live material inside `a`.
    pub fn restrict(&self, a: &Piece) -> MetricGraph {
        let mut g = self.clone();
        g.live = self.live.intersection(a);
        g
    }

    /// Deletes vertices while keeping the incident edge material as open
    /// intervals.
    pub fn delete_vertices(&self, s: &BTreeSet<VertexId>) -> Result<MetricGraph> {
        for v in s {
            self.check_vertex(*v)?;
        }
        let mut g = self.clone();
        for v in s {
            g.live.vertices.remove(v);
        }
        Ok(g)
    }

    /// The other endpoint of `edge` seen from `v`.
    pub fn opposite(&self, edge: EdgeId, v: VertexId) -> Result<VertexId> {
        let e = self.edge(edge)?;
        if e.u == v {
            Ok(e.v)
        } else if e.v == v {
            Ok(e.u)
        } else {
            Err(Error::InvalidGraph(format!("{v} is not an endpoint of {edge}")))
        }
    }

    /// Edge offset of endpoint `v` on `edge` (`0` for `u`, the length for `v`).
    pub fn offset_of(&self, edge: EdgeId, v: VertexId) -> Result<f64> {
        let e = self.edge(edge)?;
        if e.u == v {
            Ok(0.0)
        } else if e.v == v {
            Ok(e.length)
        } else {
            Err(Error::InvalidGraph(format!("{v} is not an endpoint of {edge}")))
        }
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }
}
