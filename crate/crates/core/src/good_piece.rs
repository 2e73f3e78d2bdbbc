//! Selecting a part that can be handed out while costing every other agent at
//! most one of her parts.
//!
//! A part is *0-good* in a family when any two members meeting it also meet
//! each other, and *s-good* when any two members within distance `< s` of it
//! are within distance `< s` of each other. On a tree both always exist.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric_graph::net::{Net, Pos};
use crate::metric_graph::{MetricGraph, Piece, PointRef};
use crate::TOLERANCE;

/// Brute-force 0-goodness check of `family[j]`.
pub fn is_zero_good(family: &[Piece], j: usize) -> bool {
    let touching: Vec<usize> = (0..family.len())
        .filter(|&i| i != j && family[i].intersects(&family[j]))
        .collect();
    touching
        .iter()
        .enumerate()
        .all(|(a, &i1)| touching[a + 1..].iter().all(|&i2| family[i1].intersects(&family[i2])))
}

/// Brute-force s-goodness check of `family[j]`.
pub fn is_s_good(g: &MetricGraph, family: &[Piece], j: usize, s: f64) -> Result<bool> {
    let mut near = Vec::new();
    for (i, x) in family.iter().enumerate() {
        if i != j && g.piece_distance(x, &family[j])?.value() < s {
            near.push(i);
        }
    }
    for (a, &i1) in near.iter().enumerate() {
        for &i2 in &near[a + 1..] {
            if g.piece_distance(&family[i1], &family[i2])?.value() >= s {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Net over the live material plus the component shared by all pieces,
/// which must be a tree.
fn common_tree(g: &MetricGraph, family: &[Piece], marks: Vec<(crate::EdgeId, f64)>) -> Result<(Net, usize)> {
    if family.is_empty() {
        return Err(Error::Precondition("empty family".into()));
    }
    let net = g.net(marks);
    let mut comp = None;
    for (j, x) in family.iter().enumerate() {
        if x.is_empty() {
            return Err(Error::EmptyPiece);
        }
        g.check_piece(x)?;
        if !g.is_connected_piece(x) {
            return Err(Error::Precondition(format!("piece {j} is not connected")));
        }
        let c = net.component_of(g, x).ok_or(Error::EmptyPiece)?;
        match comp {
            None => comp = Some(c),
            Some(c0) if c0 != c => {
                return Err(Error::Precondition("pieces lie in different components".into()));
            }
            _ => {}
        }
    }
    let c = comp.expect("family nonempty");
    if !net.comp_is_tree(c) {
        return Err(Error::NotAForest);
    }
    Ok((net, c))
}

/// An end of a piece along a link: offset and whether the point belongs to the piece.
#[derive(Clone, Copy)]
struct End {
    at: f64,
    closed: bool,
}

/// Hull of a piece inside an open link.
#[derive(Clone, Copy)]
struct Hull {
    lo: End,
    hi: End,
}

/// Index of a 0-good member, found by peeling leaf links of the tree.
///
/// On a single segment the member with the leftmost right end is chosen,
/// preferring one that does not own that end, then the lowest index. When a
/// leaf link carries members that avoid its inner endpoint `u`, the one whose
/// `u`-side end is farthest from `u` wins under the same tie rules; otherwise
/// the leaf is discarded and the search continues on the rest of the tree.
pub fn find_zero_good(g: &MetricGraph, family: &[Piece]) -> Result<usize> {
    let (net, c) = common_tree(g, family, Vec::new())?;
    let members: Vec<Vec<bool>> = family.iter().map(|x| net.members(g, x)).collect();
    let open_link = |li: usize, x: &Piece| -> Option<Hull> {
        let l = net.links[li];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let (mut lo_closed, mut hi_closed) = (false, false);
        for s in x.spans_on(l.edge) {
            let a = s.start.max(l.t0);
            let b = s.end.min(l.t1);
            let inside = a < b || (a == b && a > l.t0 && a < l.t1 && s.contains(a));
            if !inside {
                continue;
            }
            if a < lo {
                lo = a;
                lo_closed = a > l.t0 && s.contains(a);
            }
            if b > hi {
                hi = b;
                hi_closed = b < l.t1 && s.contains(b);
            }
        }
        (lo <= hi).then_some(Hull {
            lo: End { at: lo, closed: lo_closed },
            hi: End { at: hi, closed: hi_closed },
        })
    };
    let comp_links: Vec<usize> = (0..net.links.len())
        .filter(|&i| net.comp[net.links[i].n0] == c)
        .collect();
    let mut on_link: Vec<Vec<Option<Hull>>> = vec![vec![None; net.links.len()]; family.len()];
    for (j, x) in family.iter().enumerate() {
        for &li in &comp_links {
            on_link[j][li] = open_link(li, x);
        }
    }
    let mut active = vec![false; net.links.len()];
    let mut degree = vec![0usize; net.nodes.len()];
    for &li in &comp_links {
        active[li] = true;
        degree[net.links[li].n0] += 1;
        degree[net.links[li].n1] += 1;
    }
    let mut remaining = comp_links.len();
    let pick = |cands: Vec<(usize, f64, bool)>, larger_is_better: bool| -> usize {
        let mut best = cands[0];
        for &cand in &cands[1..] {
            let better_key = if larger_is_better { cand.1 > best.1 } else { cand.1 < best.1 };
            if better_key || (cand.1 == best.1 && best.2 && !cand.2) {
                best = cand;
            }
        }
        best.0
    };
    loop {
        if remaining == 0 {
            return Ok(0);
        }
        if remaining == 1 {
            let li = (0..active.len()).find(|&i| active[i]).expect("one active link");
            let l = net.links[li];
            let cands = (0..family.len())
                .map(|j| {
                    let right = if members[j][l.n1] {
                        End { at: l.t1, closed: true }
                    } else if let Some(h) = on_link[j][li] {
                        h.hi
                    } else {
                        End { at: l.t0, closed: true }
                    };
                    (j, right.at, right.closed)
                })
                .collect();
            return Ok(pick(cands, false));
        }
        let w = (0..net.nodes.len())
            .find(|&n| degree[n] == 1 && net.comp[n] == c)
            .expect("a finite tree has a leaf");
        let li = *net.adj[w].iter().find(|&&li| active[li]).expect("leaf has an active link");
        let l = net.links[li];
        let u = l.other(w);
        let u_is_right = u == l.n1;
        let mut cands = Vec::new();
        for j in 0..family.len() {
            if members[j][u] || !(on_link[j][li].is_some() || members[j][w]) {
                continue;
            }
            let end = match on_link[j][li] {
                Some(h) if u_is_right => h.hi,
                Some(h) => h.lo,
                None => End {
                    at: if u_is_right { l.t0 } else { l.t1 },
                    closed: true,
                },
            };
            let gap = if u_is_right { l.t1 - end.at } else { end.at - l.t0 };
            cands.push((j, gap, end.closed));
        }
        if !cands.is_empty() {
            return Ok(pick(cands, true));
        }
        active[li] = false;
        degree[w] -= 1;
        degree[u] -= 1;
        remaining -= 1;
    }
}

/// How the selected piece relates to another member of the family.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairWitness {
    /// The members meet; `x0` must then belong to the other member.
    Intersecting { j: usize, x0_in_other: bool },
    /// The members are disjoint.
    Disjoint {
        j: usize,
        /// Nearest point of the selected piece to member `j` (should be `x0`).
        nearest_to_other: PointRef,
        /// Nearest point of member `j` to the selected piece.
        y: PointRef,
        /// Where the path from `x0` to `y` comes closest to the root.
        z: PointRef,
        dist_y_z: f64,
        dist_x0_z: f64,
        dist_sets: f64,
        dist_x0_to_other: f64,
    },
}

/// Record of an s-good selection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodPieceTrace {
    pub chosen: usize,
    pub root: PointRef,
    pub projections: Vec<PointRef>,
    pub distances: Vec<f64>,
    pub witnesses: Vec<PairWitness>,
}

pub(crate) fn points_close(a: &PointRef, b: &PointRef) -> bool {
    match (a, b) {
        (PointRef::Vertex(x), PointRef::Vertex(y)) => x == y,
        (PointRef::Interior { edge: e, offset: s }, PointRef::Interior { edge: f, offset: t }) => {
            e == f && (s - t).abs() <= TOLERANCE
        }
        _ => false,
    }
}

impl GoodPieceTrace {
    /// Whether every recorded witness has the shape the selection argument predicts.
    pub fn claims_hold(&self) -> bool {
        let x0 = &self.projections[self.chosen];
        let best = self.distances.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if self.distances[self.chosen] < best - TOLERANCE {
            return false;
        }
        self.witnesses.iter().all(|w| match w {
            PairWitness::Intersecting { x0_in_other, .. } => *x0_in_other,
            PairWitness::Disjoint {
                nearest_to_other,
                dist_y_z,
                dist_x0_z,
                dist_sets,
                dist_x0_to_other,
                ..
            } => {
                points_close(nearest_to_other, x0)
                    && *dist_y_z <= dist_x0_z + TOLERANCE
                    && (dist_sets - dist_x0_to_other).abs() <= TOLERANCE
            }
        })
    }
}

/// Index of an s-good member, rooted at the smallest vertex of the tree,
/// with full witnesses.
pub fn find_s_good(g: &MetricGraph, family: &[Piece], s: f64) -> Result<(usize, GoodPieceTrace)> {
    find_s_good_rooted(g, family, s, None, true)
}

/// Selects the member whose nearest point to `root` is farthest from it
/// (ties to the lowest index). Without an explicit root the smallest live
/// vertex of the tree is used, or the first point of its lowest segment if
/// it has no live vertex.
pub fn find_s_good_rooted(
    g: &MetricGraph,
    family: &[Piece],
    s: f64,
    root: Option<PointRef>,
    with_witnesses: bool,
) -> Result<(usize, GoodPieceTrace)> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameters(format!("separation {s} must be positive")));
    }
    for (j, x) in family.iter().enumerate() {
        if !x.is_closed(g) {
            return Err(Error::Precondition(format!("piece {j} is not closed")));
        }
    }
    let mut marks: Vec<_> = family.iter().flat_map(|x| x.marks()).collect();
    if let Some(PointRef::Interior { edge, offset }) = root {
        marks.push((edge, offset));
    }
    let (net, c) = common_tree(g, family, marks)?;
    let rn = match root {
        Some(r) => {
            g.check_point(&r)?;
            let n = net.node_at(&r).expect("marked root has a node");
            if net.comp[n] != c {
                return Err(Error::NoPath);
            }
            n
        }
        None => default_root(&net, c),
    };
    let root = net.point_of(rn);
    let dist = net.dijkstra([rn]);
    let mut projections = Vec::with_capacity(family.len());
    let mut distances = Vec::with_capacity(family.len());
    for x in family {
        let m = net.members(g, x);
        let best = (0..m.len())
            .filter(|&i| m[i])
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            .ok_or(Error::EmptyPiece)?;
        projections.push(net.point_of(best));
        distances.push(dist[best]);
    }
    let mut chosen = 0;
    for j in 1..family.len() {
        if distances[j] > distances[chosen] {
            chosen = j;
        }
    }
    let mut trace = GoodPieceTrace {
        chosen,
        root,
        projections,
        distances,
        witnesses: Vec::new(),
    };
    if with_witnesses {
        trace.witnesses = witnesses(g, family, &trace)?;
    }
    Ok((chosen, trace))
}

fn default_root(net: &Net, c: usize) -> usize {
    let vertex = (0..net.nodes.len())
        .filter(|&n| net.comp[n] == c && net.nodes[n].present)
        .filter_map(|n| match net.nodes[n].pos {
            Pos::Vertex(v) => Some((v, n)),
            Pos::OnEdge(..) => None,
        })
        .min();
    if let Some((_, n)) = vertex {
        return n;
    }
    (0..net.nodes.len())
        .find(|&n| net.comp[n] == c && net.nodes[n].present)
        .expect("a component with material has a present node")
}

fn witnesses(g: &MetricGraph, family: &[Piece], trace: &GoodPieceTrace) -> Result<Vec<PairWitness>> {
    let j0 = trace.chosen;
    let x0 = trace.projections[j0];
    let x0_piece = Piece::point(g, &x0)?;
    let mut out = Vec::new();
    for (j, xj) in family.iter().enumerate() {
        if j == j0 {
            continue;
        }
        if family[j0].intersects(xj) {
            out.push(PairWitness::Intersecting {
                j,
                x0_in_other: xj.contains_point(&x0),
            });
            continue;
        }
        let nearest_to_other = g.nearest_in_piece_to_piece(&family[j0], xj)?;
        let y = g.nearest_in_piece_to_piece(xj, &family[j0])?;
        let path = g.tree_path(&x0, &y)?;
        let z = g.nearest_in_piece_to_point(&path, &trace.root)?;
        out.push(PairWitness::Disjoint {
            j,
            nearest_to_other,
            y,
            z,
            dist_y_z: g.shortest_distance(&y, &z)?.value(),
            dist_x0_z: g.shortest_distance(&x0, &z)?.value(),
            dist_sets: g.piece_distance(&family[j0], xj)?.value(),
            dist_x0_to_other: g.piece_distance(&x0_piece, xj)?.value(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_graph::{EdgeId, IntervalOnEdge, VertexId};

    fn unit() -> MetricGraph {
        MetricGraph::from_edges(&[(0, 1, 1.0)]).unwrap()
    }

    fn iv(g: &MetricGraph, e: u32, a: f64, b: f64) -> Piece {
        Piece::closed_interval(g, EdgeId(e), a, b).unwrap()
    }

    fn star(len: f64) -> MetricGraph {
        MetricGraph::from_edges(&[(0, 1, len), (0, 2, len), (0, 3, len)]).unwrap()
    }

    #[test]
    fn zero_good_on_an_interval() {
        let g = unit();
        let fam = vec![iv(&g, 0, 0.0, 0.5), iv(&g, 0, 0.4, 1.0), iv(&g, 0, 0.6, 1.0)];
        assert!(is_zero_good(&fam, 0));
        assert!(!is_zero_good(&fam, 1));
        assert!(is_zero_good(&fam[..1], 0));
        assert_eq!(find_zero_good(&g, &fam).unwrap(), 0);
    }

    #[test]
    fn zero_good_prefers_the_right_open_piece() {
        let g = unit();
        let fam = vec![
            iv(&g, 0, 0.5, 0.9),
            Piece::from_interval(&g, IntervalOnEdge::open(EdgeId(0), 0.2, 0.5)).unwrap(),
            iv(&g, 0, 0.1, 0.5),
        ];
        let j = find_zero_good(&g, &fam).unwrap();
        assert_eq!(j, 1);
        assert!(is_zero_good(&fam, j));
        // the closed candidate with the same right end is not good
        assert!(!is_zero_good(&fam, 2));
    }

    #[test]
    fn zero_good_when_all_share_the_center() {
        let g = star(1.0);
        let fam = vec![
            iv(&g, 0, 0.0, 0.5).union(&iv(&g, 1, 0.0, 0.3)),
            iv(&g, 1, 0.0, 0.8),
            iv(&g, 2, 0.0, 0.2),
        ];
        let j = find_zero_good(&g, &fam).unwrap();
        assert!(is_zero_good(&fam, j));
    }

    #[test]
    fn zero_good_peels_into_the_tree() {
        let g = star(1.0);
        let open_center = |e: u32| {
            Piece::from_interval(&g, IntervalOnEdge::with_flags(EdgeId(e), 0.0, 1.0, false, true)).unwrap()
        };
        let fam = vec![
            open_center(0),
            open_center(1),
            Piece::vertex(VertexId(0)).union(&iv(&g, 2, 0.0, 1.0)),
            iv(&g, 0, 0.0, 0.5).union(&iv(&g, 1, 0.0, 0.5)),
        ];
        let j = find_zero_good(&g, &fam).unwrap();
        assert!(is_zero_good(&fam, j), "picked {j}");
    }

    #[test]
    fn zero_good_rejects_bad_input() {
        let g = unit();
        assert!(find_zero_good(&g, &[]).is_err());
        let cyc = MetricGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        assert_eq!(find_zero_good(&cyc, &[iv(&cyc, 0, 0.1, 0.2)]), Err(Error::NotAForest));
    }

    fn star_family(g: &MetricGraph) -> Vec<Piece> {
        vec![iv(g, 0, 0.6, 3.0), iv(g, 1, 0.6, 3.0), iv(g, 2, 0.2, 3.0)]
    }

    #[test]
    fn s_good_star_examples() {
        let g = star(3.0);
        let fam = star_family(&g);
        assert!(!is_s_good(&g, &fam, 2, 1.0).unwrap());
        assert!(is_s_good(&g, &fam, 0, 1.0).unwrap());
        let root = PointRef::Vertex(VertexId(1));
        let (j, trace) = find_s_good_rooted(&g, &fam, 1.0, Some(root), true).unwrap();
        assert_eq!(j, 1);
        let expected = [0.0, 3.6, 3.2];
        for (d, e) in trace.distances.iter().zip(expected) {
            assert!((d - e).abs() < 1e-12);
        }
        assert!(is_s_good(&g, &fam, j, 1.0).unwrap());
        assert!(trace.claims_hold());
    }

    #[test]
    fn s_good_singleton() {
        let g = star(1.0);
        let (j, trace) = find_s_good(&g, &[iv(&g, 0, 0.2, 0.3)], 0.5).unwrap();
        assert_eq!(j, 0);
        assert!(trace.witnesses.is_empty());
    }

    #[test]
    fn star_short_leg_is_not_s_good() {
        let g = star(1.0);
        let fam = vec![iv(&g, 0, 0.25, 1.0), iv(&g, 2, 0.25, 1.0), iv(&g, 1, 0.2, 1.0)];
        assert!(!is_s_good(&g, &fam, 2, 0.5).unwrap());
        let roots = [
            None,
            Some(PointRef::Vertex(VertexId(2))),
            Some(PointRef::interior(EdgeId(0), 0.1)),
            Some(PointRef::interior(EdgeId(1), 0.6)),
            Some(PointRef::interior(EdgeId(2), 0.9)),
        ];
        for r in roots {
            let (j, trace) = find_s_good_rooted(&g, &fam, 0.5, r, true).unwrap();
            assert_ne!(j, 2);
            assert!(is_s_good(&g, &fam, j, 0.5).unwrap());
            assert!(trace.claims_hold());
        }
    }

    #[test]
    fn s_good_requires_closed_pieces() {
        let g = unit();
        let open = Piece::from_interval(&g, IntervalOnEdge::open(EdgeId(0), 0.2, 0.5)).unwrap();
        assert!(matches!(find_s_good(&g, &[open], 0.1), Err(Error::Precondition(_))));
    }
}
