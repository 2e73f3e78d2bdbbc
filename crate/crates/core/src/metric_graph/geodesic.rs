use super::net::Net;
use super::piece::Span;
use super::{EdgeId, GraphDistance, MetricGraph, Piece, PointRef};
use crate::error::{Error, Result};

fn point_marks(p: &PointRef) -> Option<(EdgeId, f64)> {
    match *p {
        PointRef::Interior { edge, offset } => Some((edge, offset)),
        PointRef::Vertex(_) => None,
    }
}

impl MetricGraph {
    pub(crate) fn net(&self, marks: impl IntoIterator<Item = (EdgeId, f64)>) -> Net {
        Net::build(self, &self.live, marks)
    }

    /// Length of a shortest path from `p` to `q` through live material.
    pub fn shortest_distance(&self, p: &PointRef, q: &PointRef) -> Result<GraphDistance> {
        self.check_point(p)?;
        self.check_point(q)?;
        let net = self.net(point_marks(p).into_iter().chain(point_marks(q)));
        let a = net.node_at(p).expect("marked point has a node");
        let b = net.node_at(q).expect("marked point has a node");
        Ok(GraphDistance::from_f64(net.dijkstra([a])[b]))
    }

    /// Infimum of pairwise distances between two pieces.
    pub fn piece_distance(&self, a: &Piece, b: &Piece) -> Result<GraphDistance> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptyPiece);
        }
        self.check_piece(a)?;
        self.check_piece(b)?;
        let net = self.net(a.marks().chain(b.marks()));
        let src = net.closure_members(self, a);
        let dst = net.closure_members(self, b);
        let dist = net.dijkstra((0..src.len()).filter(|&i| src[i]));
        let d = (0..dst.len())
            .filter(|&i| dst[i])
            .map(|i| dist[i])
            .fold(f64::INFINITY, f64::min);
        Ok(GraphDistance::from_f64(d))
    }

    /// A pair of points of the closures of `a` and `b` realising their
    /// distance, or `None` when they lie in different components.
    pub fn closest_points(&self, a: &Piece, b: &Piece) -> Result<Option<(PointRef, PointRef, f64)>> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptyPiece);
        }
        self.check_piece(a)?;
        self.check_piece(b)?;
        let net = self.net(a.marks().chain(b.marks()));
        let src = net.closure_members(self, a);
        let dst = net.closure_members(self, b);
        let argmin = |dist: &[f64], set: &[bool]| {
            (0..set.len())
                .filter(|&i| set[i])
                .min_by(|&i, &j| dist[i].total_cmp(&dist[j]))
        };
        let from_a = net.dijkstra((0..src.len()).filter(|&i| src[i]));
        let Some(nb) = argmin(&from_a, &dst) else {
            return Ok(None);
        };
        if !from_a[nb].is_finite() {
            return Ok(None);
        }
        let from_b = net.dijkstra([nb]);
        let na = argmin(&from_b, &src).expect("source set is nonempty");
        let canon = |n: usize| -> Result<PointRef> {
            match net.point_of(n) {
                PointRef::Interior { edge, offset } => self.point(edge, offset),
                p => Ok(p),
            }
        };
        Ok(Some((canon(na)?, canon(nb)?, from_a[nb])))
    }

    /// Whether `a` is path-connected using only its own points. The empty
    /// piece counts as connected.
    pub fn is_connected_piece(&self, a: &Piece) -> bool {
        Net::build(self, a, std::iter::empty()).comp_count <= 1
    }

    /// Connected components of the live material.
    pub fn components(&self) -> Vec<Piece> {
        let net = self.net(std::iter::empty());
        (0..net.comp_count).map(|c| net.component_piece(self, c)).collect()
    }

    /// Whether the live material contains no cycle.
    pub fn is_forest(&self) -> bool {
        self.net(std::iter::empty()).is_forest()
    }

    /// The unique simple path between two points of an acyclic component.
    pub fn tree_path(&self, p: &PointRef, q: &PointRef) -> Result<Piece> {
        self.check_point(p)?;
        self.check_point(q)?;
        let net = self.net(point_marks(p).into_iter().chain(point_marks(q)));
        let a = net.node_at(p).expect("marked point has a node");
        let b = net.node_at(q).expect("marked point has a node");
        if net.comp[a] != net.comp[b] {
            return Err(Error::NoPath);
        }
        if !net.comp_is_tree(net.comp[a]) {
            return Err(Error::NotAForest);
        }
        let links = net.path_links(a, b).ok_or(Error::NoPath)?;
        Ok(net.piece_of(self, links, [a]))
    }

    fn check_closed_connected(&self, x: &Piece, what: &str) -> Result<()> {
        if x.is_empty() {
            return Err(Error::EmptyPiece);
        }
        self.check_piece(x)?;
        if !x.is_closed(self) {
            return Err(Error::Precondition(format!("{what} is not closed")));
        }
        if !self.is_connected_piece(x) {
            return Err(Error::Precondition(format!("{what} is not connected")));
        }
        Ok(())
    }

    /// The point of `x` closest to `r`; every path from `x` to `r` leaves
    /// `x` through it.
    pub fn nearest_in_piece_to_point(&self, x: &Piece, r: &PointRef) -> Result<PointRef> {
        self.check_closed_connected(x, "piece")?;
        self.check_point(r)?;
        let net = self.net(x.marks().chain(point_marks(r)));
        let rn = net.node_at(r).expect("marked point has a node");
        self.nearest_on_net(&net, x, [rn])
    }

    /// The point of `x` through which every path from `x` to `r` passes.
    pub fn nearest_in_piece_to_piece(&self, x: &Piece, r: &Piece) -> Result<PointRef> {
        self.check_closed_connected(x, "piece")?;
        self.check_closed_connected(r, "reference piece")?;
        if x.intersects(r) {
            return Err(Error::Overlap);
        }
        let net = self.net(x.marks().chain(r.marks()));
        let rm = net.members(self, r);
        self.nearest_on_net(&net, x, (0..rm.len()).filter(|&i| rm[i]))
    }

    fn nearest_on_net(&self, net: &Net, x: &Piece, sources: impl IntoIterator<Item = usize>) -> Result<PointRef> {
        let sources: Vec<usize> = sources.into_iter().collect();
        let xm = net.members(self, x);
        let cx = net.component_of(self, x).ok_or(Error::EmptyPiece)?;
        if !sources.iter().any(|&s| net.comp[s] == cx) {
            return Err(Error::NoPath);
        }
        if !net.comp_is_tree(cx) {
            return Err(Error::NotAForest);
        }
        let dist = net.dijkstra(sources);
        let best = (0..xm.len())
            .filter(|&i| xm[i])
            .min_by(|&i, &j| dist[i].total_cmp(&dist[j]))
            .ok_or(Error::EmptyPiece)?;
        Ok(net.point_of(best))
    }

    /// The open neighborhood `{x : Dist(x, a) < s}` within the live material.
    pub fn s_neighborhood(&self, a: &Piece, s: f64) -> Result<Piece> {
        if a.is_empty() {
            return Err(Error::EmptyPiece);
        }
        if !(s > 0.0) {
            return Err(Error::InvalidParameters(format!("separation {s} must be positive")));
        }
        self.check_piece(a)?;
        let net = self.net(a.marks());
        let src = net.closure_members(self, a);
        let dist = net.dijkstra((0..src.len()).filter(|&i| src[i]));
        let mut out = Piece::empty();
        for l in &net.links {
            if net.link_inside(l, a) {
                out.add_raw(self, l.edge, Span::new(l.t0, l.t1, true, true));
                continue;
            }
            let (d0, d1) = (dist[l.n0], dist[l.n1]);
            if d0 < s {
                let reach = l.t0 + (s - d0);
                let span = if reach >= l.t1 {
                    Span::new(l.t0, l.t1, true, true)
                } else {
                    Span::new(l.t0, reach, true, false)
                };
                out.add_raw(self, l.edge, span);
            }
            if d1 < s {
                let reach = l.t1 - (s - d1);
                let span = if reach <= l.t0 {
                    Span::new(l.t0, l.t1, true, true)
                } else {
                    Span::new(reach, l.t1, false, true)
                };
                out.add_raw(self, l.edge, span);
            }
        }
        for (i, node) in net.nodes.iter().enumerate() {
            if node.present && dist[i] < s {
                out = out.union(&net.piece_of(self, [], [i]));
            }
        }
        Ok(out.intersection(&self.live))
    }
}
