//! On a graph with cycles, `n + |fvs|` parts per agent still let everyone
//! keep a whole part.

use graphcake::allocator::{allocate_general, verify_allocation, IntersectionMode};
use graphcake::instances::{random_graph_with_small_fvs, random_partition};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> graphcake::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let s = 0.4;
    let g = random_graph_with_small_fvs(&mut rng, 8, 2, (1.0, 3.0))?;
    let fvs = g.fvs();
    println!("feedback vertex set {fvs:?}, circuit rank {}", g.circuit_rank());

    let n = 3;
    let k = n + fvs.len();
    let partitions = (0..n)
        .map(|a| random_partition(&mut rng, &g, a, k, s))
        .collect::<graphcake::Result<Vec<_>>>()?;
    let alloc = allocate_general(&g, &partitions, s)?;
    for piece in &alloc.pieces {
        println!("agent {} keeps part {:?}", piece.agent, piece.contains_part);
    }
    let report = verify_allocation(&g, &alloc, s, IntersectionMode::Disjoint, Some(&partitions), None, None);
    println!("separated in the original graph: {}", report.passed);
    Ok(())
}
