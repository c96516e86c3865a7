//! Query d-separation on a diamond graph, with and without an intervention.
//!
//! Run with `cargo run --example d_separation`.

use igsp::graph::d_separated;
use igsp::{Dag, DsepOracle, InterventionFamily, NodeSet};

fn set(nodes: &[usize]) -> NodeSet {
    nodes.iter().copied().collect()
}

fn main() -> igsp::Result<()> {
    // 0 -> 1 -> 3 and 0 -> 2 -> 3: two paths from source to sink.
    let dag = Dag::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)])?;
    println!("diamond: {:?}", dag.arrows().collect::<Vec<_>>());

    for (a, b, c) in [
        (0, 3, vec![]),
        (0, 3, vec![1, 2]),
        (1, 2, vec![0]),
        (1, 2, vec![0, 3]),
    ] {
        let sep = d_separated(&dag, &set(&[a]), &set(&[b]), &set(&c))?;
        println!("  {a} _||_ {b} | {c:?} -> {sep}");
    }

    // Intervening on node 1 severs 0 -> 1, so the oracle for that regime
    // answers queries on the mutilated graph.
    let family = InterventionFamily::new(vec![set(&[]), set(&[1])])?;
    let oracle = DsepOracle::new(&dag, &family)?;
    println!("\nregime graphs under targets {:?}:", family.targets());
    for k in 0..family.regime_count() {
        println!("  regime {k}: {:?}", oracle.graph(k)?.arrows().collect::<Vec<_>>());
    }

    use igsp::citest::CiOracle;
    for k in 0..2 {
        let indep = oracle.query(0, 1, &set(&[]), k)?;
        println!("  regime {k}: 0 _||_ 1 | {{}} -> {indep}");
    }
    Ok(())
}
