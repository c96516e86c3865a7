//! Enumerate a Markov equivalence class and refine it with interventions.
//!
//! Observationally a chain is indistinguishable from its reversal and from
//! forks along it. Intervening on a node splits the class; enough targets
//! make it a singleton. Run with `cargo run --example equivalence_classes`.

use igsp::graph::{cpdag, enumerate_mec, i_essential_graph, i_markov_equivalent};
use igsp::{Dag, InterventionFamily, NodeSet};

fn set(nodes: &[usize]) -> NodeSet {
    nodes.iter().copied().collect()
}

fn main() -> igsp::Result<()> {
    let truth = Dag::new(4, [(0, 1), (1, 2), (2, 3)])?;
    println!("truth: {:?}", truth.arrows().collect::<Vec<_>>());

    let members = enumerate_mec(&truth);
    println!("\nobservational class ({} members):", members.len());
    for g in &members {
        println!("  {:?}", g.arrows().collect::<Vec<_>>());
    }
    let ess = cpdag(&truth);
    println!(
        "essential graph: directed {:?}, undirected {:?}",
        ess.directed(),
        ess.undirected()
    );

    for targets in [vec![set(&[]), set(&[1])], vec![set(&[]), set(&[1]), set(&[2])]] {
        let family = InterventionFamily::new(targets)?;
        let mut kept = 0;
        for g in &members {
            if i_markov_equivalent(g, &truth, &family)? {
                kept += 1;
            }
        }
        let ess = i_essential_graph(&truth, &family)?;
        println!(
            "\ntargets {:?}: {kept} of {} members survive",
            family.targets(),
            members.len()
        );
        println!(
            "interventional essential graph: directed {:?}, undirected {:?}",
            ess.directed(),
            ess.undirected()
        );
    }
    Ok(())
}
