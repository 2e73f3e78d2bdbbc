//! Each agent keeps one of her own parts intact on a forest, with pieces
//! pairwise at least `s` apart.

use graphcake::allocator::{allocate_forest, verify_allocation, IntersectionMode};
use graphcake::instances::gen_random_forest_instance;

fn main() -> graphcake::Result<()> {
    let s = 0.5;
    let doc = gen_random_forest_instance(2024, 2, 10, 4, s)?;
    let g = doc.graph()?;
    let partitions = doc.partitions(&g)?;
    let alloc = allocate_forest(&g, &partitions, s)?;
    for piece in &alloc.pieces {
        println!(
            "agent {} receives her part {:?} ({:.3} units long)",
            piece.agent,
            piece.contains_part,
            piece.piece.length()
        );
    }
    let report = verify_allocation(&g, &alloc, s, IntersectionMode::Disjoint, Some(&partitions), None, None);
    println!("verification passed: {} ({} checks)", report.passed, report.checks_run);
    Ok(())
}
