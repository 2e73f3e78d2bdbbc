//! Maximin shares: exact on paths, grid-searched on anything else.

use graphcake::mms::{maximin_share, mms_discretized};
use graphcake::{EdgeId, MetricGraph, Valuation};

fn main() -> graphcake::Result<()> {
    let path = MetricGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0)])?;
    let v = Valuation::new(&path, &[(EdgeId(0), vec![(0.0, 1.0, 2.0)]), (EdgeId(1), vec![(0.0, 1.0, 1.0)])])?;
    for s in [0.0, 0.3] {
        let r = maximin_share(&v, &path, 3, s)?;
        println!("path, k=3, s={s}: share {:.4} by {:?}", r.value, r.method);
    }

    let star = MetricGraph::from_edges(&[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])?;
    let u = Valuation::uniform(&star, 1.0)?;
    let r = mms_discretized(&u, &star, 3, 0.0, Some(0.05))?;
    println!(
        "star, k=3, s=0: share {:.4} at resolution {:?}, {} parts",
        r.value,
        r.resolution,
        r.partition.parts.len()
    );
    Ok(())
}
