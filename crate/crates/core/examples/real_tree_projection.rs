//! Nearest points on a tree: every path from a subtree to an outside point
//! leaves the subtree through one point, and distances split there.

use graphcake::{EdgeId, MetricGraph, Piece, PointRef};

fn main() -> graphcake::Result<()> {
    // a spider with three legs of length 2 around vertex 0
    let g = MetricGraph::from_edges(&[(0, 1, 2.0), (0, 2, 2.0), (0, 3, 2.0)])?;
    let x = Piece::closed_interval(&g, EdgeId(0), 0.5, 2.0)?;
    let r = g.point(EdgeId(2), 1.5)?;
    let exit = g.nearest_in_piece_to_point(&x, &r)?;
    println!("subtree [0.5, 2] on leg 0 is left through {exit:?}");

    let y = PointRef::Vertex(graphcake::VertexId(1));
    let direct = g.shortest_distance(&y, &r)?.value();
    let split = g.shortest_distance(&y, &exit)?.value() + g.shortest_distance(&exit, &r)?.value();
    println!("Dist(y, r) = {direct:.3}, via the exit point = {split:.3}");

    let other = Piece::closed_interval(&g, EdgeId(1), 1.0, 2.0)?;
    let shared = g.nearest_in_piece_to_piece(&x, &other)?;
    println!("seen from the whole of leg 1's tip, the exit is still {shared:?}");
    Ok(())
}
