//! Sweep the CI-test cutoff against sample size on random models.
//!
//! Each cell reports how often the search recovers the interventional
//! equivalence class. Recovery improves with more data, and the best cutoff
//! drifts as the tests sharpen. Run with
//! `cargo run --release --example alpha_sweep` (a minute or so).

use igsp::eval::{consistency_sweep, SweepOptions, SweepScenario};

fn main() -> igsp::Result<()> {
    let scenario = SweepScenario {
        p: 5,
        density: 1.5,
        interventional_regimes: 1,
        target_size: 2,
        weight_floor: 0.5,
        sample_sizes: vec![500, 5_000, 50_000],
    };
    let alphas = [1e-4, 1e-3, 1e-2, 5e-2];
    let rows = consistency_sweep(&scenario, &SweepOptions::default(), &alphas, 25, 2)?;

    println!("{:<10} {:>8} {:>10} {:>8}", "alpha", "n", "recovered", "trials");
    for row in rows {
        println!(
            "{:<10} {:>8} {:>10.2} {:>8}",
            row.alpha,
            row.n,
            row.proportion(),
            row.trials
        );
    }
    Ok(())
}
