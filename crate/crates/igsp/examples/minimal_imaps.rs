//! Build the minimal I-MAP of a chain under every variable ordering.
//!
//! The sparsest orderings recover two arrows; orderings that place both
//! endpoints before the middle node are forced into a complete graph.
//! Run with `cargo run --example minimal_imaps`.

use igsp::imap::{conditioning_set, minimal_imap};
use igsp::{Dag, DsepOracle, InterventionFamily, Permutation};

fn main() -> igsp::Result<()> {
    let truth = Dag::new(3, [(0, 1), (1, 2)])?;
    let family = InterventionFamily::observational();
    let oracle = DsepOracle::new(&truth, &family)?;

    println!("truth: {:?}\n", truth.arrows().collect::<Vec<_>>());
    println!("{:<12} {:<24} arrows", "order", "minimal I-MAP");
    for order in [
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ] {
        let perm = Permutation::new(order.clone())?;
        let imap = minimal_imap(&perm, &oracle, 0)?;
        println!(
            "{:<12} {:<24} {}",
            format!("{order:?}"),
            format!("{:?}", imap.arrows().collect::<Vec<_>>()),
            imap.arrow_count()
        );
    }

    // The arrow decision for a pair is a single CI query against the set of
    // nodes preceding the later endpoint.
    let perm = Permutation::new(vec![0, 2, 1])?;
    let s = conditioning_set(&perm, 0, 2)?;
    println!("\nunder order [0, 2, 1], pair (0, 2) is tested given {s:?}");
    Ok(())
}
