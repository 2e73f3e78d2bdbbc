//! Components with one cycle each: matched agents take a whole cycle, the
//! rest share what is left.

use graphcake::allocator::{allocate_unicyclic_union, verify_allocation, AgentPartition, IntersectionMode};
use graphcake::{EdgeId, MetricGraph, Piece};

fn main() -> graphcake::Result<()> {
    // two triangles and a path
    let g = MetricGraph::from_edges(&[
        (0, 1, 1.0),
        (1, 2, 1.0),
        (2, 0, 1.0),
        (3, 4, 1.0),
        (4, 5, 1.0),
        (5, 3, 1.0),
        (6, 7, 4.0),
    ])?;
    let s = 0.5;
    let iv = |e, a, b| Piece::closed_interval(&g, EdgeId(e), a, b);
    // three parts each: min(n + cycles, 2n - 1) = 3
    let partitions = vec![
        AgentPartition::new(0, vec![iv(0, 0.2, 0.6)?, iv(6, 0.0, 1.0)?, iv(6, 2.0, 4.0)?], s),
        AgentPartition::new(1, vec![iv(0, 0.3, 0.5)?, iv(3, 0.3, 0.5)?, iv(6, 3.0, 4.0)?], s),
    ];
    let (alloc, report) = allocate_unicyclic_union(&g, &partitions, s)?;
    println!("decomposition {:?}", report.decomposition);
    for piece in &alloc.pieces {
        println!("agent {} holds a piece containing part {:?}", piece.agent, piece.contains_part);
    }
    let check = verify_allocation(&g, &alloc, s, IntersectionMode::Disjoint, Some(&partitions), None, None);
    println!("verification passed: {}", check.passed);
    Ok(())
}
