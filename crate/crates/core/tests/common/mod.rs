#![allow(dead_code)]

use graphcake::metric_graph::{MetricGraph, Piece, PointRef};
use rand::Rng;

/// A random point of a nonempty piece, uniform over its intervals.
pub fn point_in<R: Rng>(rng: &mut R, g: &MetricGraph, piece: &Piece) -> PointRef {
    let ivs = piece.intervals(g);
    if ivs.is_empty() {
        return piece.sample_point().expect("nonempty piece");
    }
    let iv = &ivs[rng.gen_range(0..ivs.len())];
    let t = if iv.end > iv.start {
        let x = rng.gen_range(iv.start..=iv.end);
        if (x == iv.start && !iv.closed_start) || (x == iv.end && !iv.closed_end) {
            0.5 * (iv.start + iv.end)
        } else {
            x
        }
    } else {
        iv.start
    };
    g.point(iv.edge, t).expect("offset on edge")
}

/// Largest vertex-to-vertex distance inside one component.
pub fn diameter(g: &MetricGraph) -> f64 {
    let vs = g.vertices();
    let mut best: f64 = 0.0;
    for a in vs {
        for b in vs {
            let d = g
                .shortest_distance(&PointRef::Vertex(*a), &PointRef::Vertex(*b))
                .expect("vertices exist");
            if d.is_finite() {
                best = best.max(d.value());
            }
        }
    }
    best
}
