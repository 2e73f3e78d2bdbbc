//! Cycle unions where each agent can secure value 1 with `N - 1` parts,
//! and a search for how many agents a separated allocation can serve at all.

use graphcake::instances::{check_positive_value_bound, gen_cycle_counterexample};

fn main() -> graphcake::Result<()> {
    for (n, r) in [(2, 2), (3, 5), (4, 1)] {
        let doc = gen_cycle_counterexample(n, r, 1.0, 0.05)?;
        let g = doc.graph()?;
        let vals = doc.valuations(&g)?;
        let min = doc
            .partitions(&g)?
            .iter()
            .enumerate()
            .flat_map(|(a, p)| p.parts.iter().map(|x| vals[a].piece_value(x)).collect::<Vec<_>>())
            .fold(f64::INFINITY, f64::min);
        let served = check_positive_value_bound(&doc, None)?;
        println!("n={n} r={r}: certified parts worth at least {min:.3}; at most {served} of {n} agents get positive value");
    }
    Ok(())
}
