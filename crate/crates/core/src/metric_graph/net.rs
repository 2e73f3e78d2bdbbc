//! Finite auxiliary graph over a point set of the cake.
//!
//! Nodes are the vertices of the set plus the ends of its spans and any
//! requested mark points; links are the sub-segments between consecutive
//! nodes. Shortest paths on the net are exact shortest paths on the cake.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use super::piece::Span;
use super::{EdgeId, MetricGraph, Piece, PointRef, VertexId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Pos {
    Vertex(VertexId),
    OnEdge(EdgeId, f64),
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Node {
    pub pos: Pos,
    /// Whether the node's point belongs to the set (span ends may be open).
    pub present: bool,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Link {
    pub edge: EdgeId,
    pub t0: f64,
    pub t1: f64,
    pub n0: usize,
    pub n1: usize,
}

impl Link {
    pub fn len(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.t0 + self.t1)
    }

    pub fn other(&self, n: usize) -> usize {
        if self.n0 == n {
            self.n1
        } else {
            self.n0
        }
    }
}

pub(crate) struct Net {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
    pub adj: Vec<Vec<usize>>,
    pub comp: Vec<usize>,
    pub comp_count: usize,
    vertex_node: BTreeMap<VertexId, usize>,
    by_edge: BTreeMap<EdgeId, Vec<usize>>,
    points: BTreeMap<EdgeId, Vec<usize>>,
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl Net {
    /// Net over `set` with extra nodes at `marks` that fall strictly inside spans.
    pub fn build(g: &MetricGraph, set: &Piece, marks: impl IntoIterator<Item = (EdgeId, f64)>) -> Net {
        let mut mark_map: BTreeMap<EdgeId, Vec<f64>> = BTreeMap::new();
        for (e, t) in marks {
            mark_map.entry(e).or_default().push(t);
        }
        for list in mark_map.values_mut() {
            list.sort_by(f64::total_cmp);
            list.dedup();
        }
        let mut nodes = Vec::new();
        let mut vertex_node = BTreeMap::new();
        for v in set.vertices() {
            vertex_node.insert(v, nodes.len());
            nodes.push(Node {
                pos: Pos::Vertex(v),
                present: true,
            });
        }
        let mut links = Vec::new();
        let mut by_edge: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
        let mut points: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
        for (&eid, spans) in &set.spans {
            let e = *g.edge(eid).expect("edge exists");
            let empty = Vec::new();
            let ms = mark_map.get(&eid).unwrap_or(&empty);
            for s in spans {
                if s.start == s.end {
                    points.entry(eid).or_default().push(nodes.len());
                    nodes.push(Node {
                        pos: Pos::OnEdge(eid, s.start),
                        present: true,
                    });
                    continue;
                }
                let first = match (s.start == 0.0, vertex_node.get(&e.u)) {
                    (true, Some(&n)) => n,
                    (true, None) => push_node(&mut nodes, Pos::OnEdge(eid, 0.0), false),
                    (false, _) => push_node(&mut nodes, Pos::OnEdge(eid, s.start), s.closed_start),
                };
                let mut prev = (first, s.start);
                for &t in ms.iter().filter(|&&t| t > s.start && t < s.end) {
                    let n = push_node(&mut nodes, Pos::OnEdge(eid, t), true);
                    by_edge.entry(eid).or_default().push(links.len());
                    links.push(Link {
                        edge: eid,
                        t0: prev.1,
                        t1: t,
                        n0: prev.0,
                        n1: n,
                    });
                    prev = (n, t);
                }
                let last = match (s.end == e.length, vertex_node.get(&e.v)) {
                    (true, Some(&n)) => n,
                    (true, None) => push_node(&mut nodes, Pos::OnEdge(eid, e.length), false),
                    (false, _) => push_node(&mut nodes, Pos::OnEdge(eid, s.end), s.closed_end),
                };
                by_edge.entry(eid).or_default().push(links.len());
                links.push(Link {
                    edge: eid,
                    t0: prev.1,
                    t1: s.end,
                    n0: prev.0,
                    n1: last,
                });
            }
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for (i, l) in links.iter().enumerate() {
            adj[l.n0].push(i);
            adj[l.n1].push(i);
        }
        let mut comp = vec![usize::MAX; nodes.len()];
        let mut comp_count = 0;
        for start in 0..nodes.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = comp_count;
            while let Some(n) = stack.pop() {
                for &li in &adj[n] {
                    let m = links[li].other(n);
                    if comp[m] == usize::MAX {
                        comp[m] = comp_count;
                        stack.push(m);
                    }
                }
            }
            comp_count += 1;
        }
        Net {
            nodes,
            links,
            adj,
            comp,
            comp_count,
            vertex_node,
            by_edge,
            points,
        }
    }

    /// Node located exactly at `p`, if `p` is a present node of the net.
    pub fn node_at(&self, p: &PointRef) -> Option<usize> {
        match *p {
            PointRef::Vertex(v) => self.vertex_node.get(&v).copied(),
            PointRef::Interior { edge, offset } => self.node_on_edge(edge, offset),
        }
    }

    pub fn node_on_edge(&self, edge: EdgeId, t: f64) -> Option<usize> {
        let present = |n: usize| self.nodes[n].present.then_some(n);
        if let Some(list) = self.by_edge.get(&edge) {
            for &li in list {
                let l = &self.links[li];
                if l.t0 == t {
                    if let Some(n) = present(l.n0) {
                        return Some(n);
                    }
                }
                if l.t1 == t {
                    if let Some(n) = present(l.n1) {
                        return Some(n);
                    }
                }
            }
        }
        self.points
            .get(&edge)
            .and_then(|list| list.iter().copied().find(|&n| self.nodes[n].pos == Pos::OnEdge(edge, t)))
    }

    pub fn point_of(&self, n: usize) -> PointRef {
        match self.nodes[n].pos {
            Pos::Vertex(v) => PointRef::Vertex(v),
            Pos::OnEdge(edge, offset) => PointRef::Interior { edge, offset },
        }
    }

    /// Membership of each node in `p` itself.
    pub fn members(&self, g: &MetricGraph, p: &Piece) -> Vec<bool> {
        self.nodes
            .iter()
            .map(|node| {
                node.present
                    && match node.pos {
                        Pos::Vertex(v) => p.contains_vertex(v),
                        Pos::OnEdge(e, t) => p.contains_offset(g, e, t),
                    }
            })
            .collect()
    }

    /// Membership of each node in the closure of `p`. Valid when every span
    /// endpoint of `p` was passed as a mark.
    pub fn closure_members(&self, g: &MetricGraph, p: &Piece) -> Vec<bool> {
        let mut out = self.members(g, p);
        for l in &self.links {
            if self.link_inside(l, p) {
                out[l.n0] = true;
                out[l.n1] = true;
            }
        }
        out
    }

    /// Whether the open link lies inside `p` (tested at its midpoint).
    pub fn link_inside(&self, l: &Link, p: &Piece) -> bool {
        let m = l.mid();
        p.spans_on(l.edge).iter().any(|s| s.contains(m))
    }

    /// Multi-source Dijkstra; unreachable nodes get `f64::INFINITY`.
    pub fn dijkstra(&self, sources: impl IntoIterator<Item = usize>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        for s in sources {
            dist[s] = 0.0;
            heap.push(Item(0.0, s));
        }
        while let Some(Item(d, n)) = heap.pop() {
            if d > dist[n] {
                continue;
            }
            for &li in &self.adj[n] {
                let l = &self.links[li];
                let m = l.other(n);
                let nd = d + l.len();
                if nd < dist[m] {
                    dist[m] = nd;
                    heap.push(Item(nd, m));
                }
            }
        }
        dist
    }

    /// Whether component `c` contains no cycle.
    pub fn comp_is_tree(&self, c: usize) -> bool {
        let nodes = self.comp.iter().filter(|&&x| x == c).count();
        let links = self.links.iter().filter(|l| self.comp[l.n0] == c).count();
        links + 1 == nodes
    }

    pub fn is_forest(&self) -> bool {
        self.links.len() + self.comp_count == self.nodes.len()
    }

    /// Breadth-first path as a list of link indices from `a` to `b`.
    pub fn path_links(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        seen[a] = true;
        let mut queue = std::collections::VecDeque::from([a]);
        while let Some(n) = queue.pop_front() {
            if n == b {
                break;
            }
            for &li in &self.adj[n] {
                let m = self.links[li].other(n);
                if !seen[m] {
                    seen[m] = true;
                    parent[m] = Some(li);
                    queue.push_back(m);
                }
            }
        }
        if !seen[b] {
            return None;
        }
        let mut out = Vec::new();
        let mut cur = b;
        while cur != a {
            let li = parent[cur].expect("parent recorded");
            out.push(li);
            cur = self.links[li].other(cur);
        }
        out.reverse();
        Some(out)
    }

    /// The point set formed by the given links (with their present ends) and nodes.
    pub fn piece_of(
        &self,
        g: &MetricGraph,
        links: impl IntoIterator<Item = usize>,
        nodes: impl IntoIterator<Item = usize>,
    ) -> Piece {
        let mut p = Piece::empty();
        for li in links {
            let l = &self.links[li];
            let span = Span::new(l.t0, l.t1, self.nodes[l.n0].present, self.nodes[l.n1].present);
            p.add_raw(g, l.edge, span);
        }
        for n in nodes {
            if !self.nodes[n].present {
                continue;
            }
            match self.nodes[n].pos {
                Pos::Vertex(v) => {
                    p.vertices.insert(v);
                }
                Pos::OnEdge(e, t) => p.add_raw(g, e, Span::new(t, t, true, true)),
            }
        }
        p
    }

    /// Material of component `c`.
    pub fn component_piece(&self, g: &MetricGraph, c: usize) -> Piece {
        let links = (0..self.links.len()).filter(|&i| self.comp[self.links[i].n0] == c);
        let nodes = (0..self.nodes.len()).filter(|&i| self.comp[i] == c);
        self.piece_of(g, links, nodes)
    }

    /// Component of the first present node lying in `p`, if any.
    pub fn component_of(&self, g: &MetricGraph, p: &Piece) -> Option<usize> {
        let members = self.members(g, p);
        if let Some(i) = members.iter().position(|&m| m) {
            return Some(self.comp[i]);
        }
        self.links
            .iter()
            .find(|l| {
                p.spans_on(l.edge)
                    .iter()
                    .any(|s| s.start.max(l.t0) < s.end.min(l.t1) || (s.start == s.end && l.t0 < s.start && s.start < l.t1))
            })
            .map(|l| self.comp[l.n0])
    }
}

fn push_node(nodes: &mut Vec<Node>, pos: Pos, present: bool) -> usize {
    nodes.push(Node { pos, present });
    nodes.len() - 1
}
