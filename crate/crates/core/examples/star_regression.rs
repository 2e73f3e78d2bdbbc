//! The short leg of a star is not s-good, so the selector never hands it out
//! first, and both agents still keep a whole part.

use graphcake::allocator::{allocate_forest, AgentPartition};
use graphcake::good_piece::{find_s_good, is_s_good};
use graphcake::{EdgeId, MetricGraph, Piece};

fn main() -> graphcake::Result<()> {
    // Alice owns the outer parts of legs 0 and 2, Bob the outer part of leg 1
    // and all of a separate edge.
    let g = MetricGraph::from_edges(&[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (4, 5, 1.0)])?;
    let iv = |e, a, b| Piece::closed_interval(&g, EdgeId(e), a, b);
    let family = vec![iv(0, 0.25, 1.0)?, iv(2, 0.25, 1.0)?, iv(1, 0.2, 1.0)?];
    println!("Bob's star part is 0.5-good: {}", is_s_good(&g, &family, 2, 0.5)?);
    let (j, _) = find_s_good(&g, &family, 0.5)?;
    println!("selected member {j}");

    let parts = vec![
        AgentPartition::new(0, vec![iv(0, 0.25, 1.0)?, iv(2, 0.25, 1.0)?], 0.5),
        AgentPartition::new(1, vec![iv(1, 0.2, 1.0)?, iv(3, 0.0, 1.0)?], 0.5),
    ];
    let alloc = allocate_forest(&g, &parts, 0.5)?;
    for p in &alloc.pieces {
        println!("agent {} keeps part {:?}", p.agent, p.contains_part);
    }
    Ok(())
}
