//! Run the sparsity search against an exact d-separation oracle.
//!
//! With a perfect oracle the search provably lands in the interventional
//! Markov equivalence class of the truth. Run with
//! `cargo run --example igsp_oracle`.

use igsp::eval::imec_recovered;
use igsp::search::igsp;
use igsp::sem::random_dag;
use igsp::{DsepOracle, InterventionFamily, NodeSet, Permutation, SearchConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> igsp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let truth = random_dag(6, 1.5, &mut rng)?;
    let family = InterventionFamily::new(vec![
        NodeSet::new(),
        [2usize].into_iter().collect(),
        [4usize, 5].into_iter().collect(),
    ])?;
    let oracle = DsepOracle::new(&truth, &family)?;
    println!("truth: {:?}", truth.arrows().collect::<Vec<_>>());
    println!("targets: {:?}", family.targets());

    let config = SearchConfig { max_depth: None, max_restarts: 5, rng_seed: 3 };
    let start = Permutation::random(6, &mut rng);
    let result = igsp(&oracle, &family, &start, &config)?;

    println!("\nstart order: {:?}", start.order());
    println!("estimate: {:?}", result.dag.arrows().collect::<Vec<_>>());
    println!("objective: {:?}", result.objective);
    for event in &result.trace {
        println!("trace: {event:?}");
    }
    println!(
        "same interventional class as truth: {}",
        imec_recovered(&result.dag, &truth, &family)?
    );
    Ok(())
}
