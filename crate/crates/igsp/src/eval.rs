//! Recovery metrics and Monte-Carlo experiment runners.
//!
//! A sweep draws a fresh model per trial, samples every regime at each
//! requested size, runs the selected search at each cutoff, and reports the
//! fraction of trials whose estimate is interventionally Markov equivalent
//! to the truth. Trials run in parallel; every random draw comes from a
//! stream derived from `(seed, trial, size index, regime)`, so the table is
//! identical no matter how the work is scheduled.

use rayon::prelude::*;
use serde::Serialize;

use crate::citest::{DataOracle, DsepOracle, RegimeData};
use crate::error::{Error, Result};
use crate::graph::{i_markov_equivalent, skeleton, Dag, InterventionFamily, NodeSet};
use crate::imap::Permutation;
use crate::rng;
use crate::score::ScoreConfig;
use crate::search::{igsp, scored_search, SearchConfig, SearchResult};
use crate::sem::{random_dag, random_weights, sample_with, InterventionDist};

/// Arrow and adjacency agreement between an estimate and the truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralCounts {
    /// Estimate arrows with the same orientation in the truth.
    pub directed_tp: usize,
    /// Estimate arrows absent or reversed in the truth.
    pub directed_fp: usize,
    /// Estimate adjacencies present in the truth.
    pub skeleton_tp: usize,
    /// Estimate adjacencies absent from the truth.
    pub skeleton_fp: usize,
    /// Arrow count of the truth, the ROC normalizer.
    pub truth_edge_count: usize,
}

pub fn structural_metrics(estimate: &Dag, truth: &Dag) -> Result<StructuralCounts> {
    if estimate.p() != truth.p() {
        return Err(Error::SizeMismatch(estimate.p(), truth.p()));
    }
    let mut counts = StructuralCounts {
        directed_tp: 0,
        directed_fp: 0,
        skeleton_tp: 0,
        skeleton_fp: 0,
        truth_edge_count: truth.arrow_count(),
    };
    for (i, j) in estimate.arrows() {
        if truth.has_arrow(i, j) {
            counts.directed_tp += 1;
        } else {
            counts.directed_fp += 1;
        }
    }
    let truth_adjacencies = skeleton(truth);
    for pair in skeleton(estimate) {
        if truth_adjacencies.contains(&pair) {
            counts.skeleton_tp += 1;
        } else {
            counts.skeleton_fp += 1;
        }
    }
    Ok(counts)
}

/// Whether the estimate lands in the truth's interventional equivalence
/// class, the success notion every sweep reports.
pub fn imec_recovered(estimate: &Dag, truth: &Dag, family: &InterventionFamily) -> Result<bool> {
    i_markov_equivalent(estimate, truth, family)
}

/// Expected agreement counts for a guess that picks `guess_arrows` distinct
/// node pairs uniformly and orients each by a fair coin. Acyclicity of the
/// guess is ignored; this is a plotting reference, not a sampler.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RandomGuessBaseline {
    pub expected_directed_tp: f64,
    pub expected_directed_fp: f64,
    pub expected_skeleton_tp: f64,
    pub expected_skeleton_fp: f64,
}

pub fn random_guess_baseline(truth: &Dag, guess_arrows: usize) -> Result<RandomGuessBaseline> {
    let p = truth.p();
    let pairs = p * (p - 1) / 2;
    if guess_arrows > pairs {
        return Err(Error::InvalidConfig(format!(
            "cannot guess {guess_arrows} arrows with only {pairs} node pairs"
        )));
    }
    let skeleton_tp = if pairs == 0 {
        0.0
    } else {
        guess_arrows as f64 * truth.arrow_count() as f64 / pairs as f64
    };
    Ok(RandomGuessBaseline {
        expected_directed_tp: skeleton_tp / 2.0,
        expected_directed_fp: guess_arrows as f64 - skeleton_tp / 2.0,
        expected_skeleton_tp: skeleton_tp,
        expected_skeleton_fp: guess_arrows as f64 - skeleton_tp,
    })
}

/// The random-model generator a sweep draws its trials from.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepScenario {
    pub p: usize,
    /// Expected neighborhood size of the random truth.
    pub density: f64,
    /// Number of interventional regimes beyond the observational one.
    pub interventional_regimes: usize,
    /// Nodes per interventional target, sampled without replacement.
    pub target_size: usize,
    /// Lower magnitude bound for the SEM weights.
    pub weight_floor: f64,
    /// Per-regime sample counts to sweep over.
    pub sample_sizes: Vec<usize>,
}

impl SweepScenario {
    fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::InvalidConfig("scenario needs at least two nodes".into()));
        }
        if self.target_size == 0 || self.target_size > self.p {
            return Err(Error::InvalidConfig(format!(
                "target size must lie in 1..={}, got {}",
                self.p, self.target_size
            )));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::InvalidConfig("at least one sample size required".into()));
        }
        Ok(())
    }
}

/// Which estimator a sweep runs.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepAlgorithm {
    /// Oracle-driven sparsity search; the cutoff feeds its CI tests.
    Igsp,
    /// Score-driven search with `delta = delta_factor * sum(lambda)`;
    /// cutoffs are ignored.
    Scored { delta_factor: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    pub algorithm: SweepAlgorithm,
    pub search: SearchConfig,
    /// Replace the finite-sample CI tests by exact d-separation on the true
    /// graph; data is neither sampled nor used.
    pub use_dsep_oracle: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            algorithm: SweepAlgorithm::Igsp,
            search: SearchConfig::default(),
            use_dsep_oracle: false,
        }
    }
}

/// One `(cutoff, sample size)` cell of the sweep table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub n: usize,
    /// Trials whose estimate recovered the truth's class.
    pub recovered: usize,
    /// Trials that errored (degenerate data and the like); excluded from
    /// the proportion's denominator.
    pub failed: usize,
    pub trials: usize,
}

impl SweepRow {
    /// Recovery fraction among completed trials (NaN if none completed).
    pub fn proportion(&self) -> f64 {
        self.recovered as f64 / (self.trials - self.failed) as f64
    }
}

/// Recovery proportions over a grid of CI cutoffs and sample sizes.
///
/// Row order is cutoff-major: all sample sizes for `alphas[0]`, then for
/// `alphas[1]`, and so on. Within a trial the model and the per-size
/// datasets are shared across cutoffs, isolating the cutoff's effect.
pub fn consistency_sweep(
    scenario: &SweepScenario,
    options: &SweepOptions,
    alphas: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    scenario.validate()?;
    if alphas.is_empty() {
        return Err(Error::InvalidConfig("at least one cutoff required".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("at least one trial required".into()));
    }
    if options.use_dsep_oracle {
        if let SweepAlgorithm::Scored { .. } = options.algorithm {
            return Err(Error::InvalidConfig(
                "the scored search has no oracle mode; it needs data".into(),
            ));
        }
    } else if matches!(options.algorithm, SweepAlgorithm::Igsp) {
        for &alpha in alphas {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "CI cutoffs must lie in (0, 1), got {alpha}"
                )));
            }
        }
    }

    let cells = alphas.len() * scenario.sample_sizes.len();
    let totals = (0..trials)
        .into_par_iter()
        .map(|trial| run_trial(scenario, options, alphas, seed, trial))
        .reduce(
            || vec![(0usize, 0usize); cells],
            |mut acc, part| {
                for (a, b) in acc.iter_mut().zip(part) {
                    a.0 += b.0;
                    a.1 += b.1;
                }
                acc
            },
        );

    let mut rows = Vec::with_capacity(cells);
    for (ai, &alpha) in alphas.iter().enumerate() {
        for (ni, &n) in scenario.sample_sizes.iter().enumerate() {
            let (recovered, failed) = totals[ai * scenario.sample_sizes.len() + ni];
            rows.push(SweepRow { alpha, n, recovered, failed, trials });
        }
    }
    Ok(rows)
}

/// Per-row `(recovered, failed)` contributions of one trial; errors become
/// failure marks rather than propagating.
fn run_trial(
    scenario: &SweepScenario,
    options: &SweepOptions,
    alphas: &[f64],
    seed: u64,
    trial: usize,
) -> Vec<(usize, usize)> {
    let sizes = scenario.sample_sizes.len();
    let cells = alphas.len() * sizes;
    let mut outcome = vec![(0usize, 0usize); cells];
    let mut gen = rng::derive(seed, rng::stream_id(trial, 0, 0));

    let prepared = (|| -> Result<_> {
        let truth = random_dag(scenario.p, scenario.density, &mut gen)?;
        let model = random_weights(&truth, scenario.weight_floor, &mut gen)?;
        let mut targets = vec![NodeSet::new()];
        for _ in 0..scenario.interventional_regimes {
            let picked = rand::seq::index::sample(&mut gen, scenario.p, scenario.target_size);
            targets.push(picked.into_iter().collect());
        }
        let family = InterventionFamily::new(targets)?;
        Ok((truth, model, family))
    })();
    let (truth, model, family) = match prepared {
        Ok(parts) => parts,
        Err(_) => {
            for cell in &mut outcome {
                cell.1 = 1;
            }
            return outcome;
        }
    };

    for ni in 0..sizes {
        let n = scenario.sample_sizes[ni];
        let start = Permutation::random(scenario.p, &mut gen);
        let dataset: Option<Result<Vec<RegimeData>>> = if options.use_dsep_oracle {
            None
        } else {
            Some(
                family
                    .targets()
                    .iter()
                    .enumerate()
                    .map(|(k, target)| {
                        let mut stream =
                            rng::derive(seed, rng::stream_id(trial, ni + 1, k));
                        sample_with(&model, n, target, InterventionDist::default(), &mut stream)
                    })
                    .collect(),
            )
        };
        // Restart streams must differ per trial and size or every trial
        // would retry the same permutations.
        let search = SearchConfig {
            rng_seed: options.search.rng_seed ^ rng::stream_id(trial, ni + 1, 0xFFFF),
            ..options.search.clone()
        };
        for (ai, &alpha) in alphas.iter().enumerate() {
            let cell = ai * sizes + ni;
            let run = || -> Result<SearchResult> {
                if options.use_dsep_oracle {
                    let oracle = DsepOracle::new(&truth, &family)?;
                    return igsp(&oracle, &family, &start, &search);
                }
                let data = match dataset.as_ref().expect("data mode") {
                    Ok(data) => data.clone(),
                    Err(e) => return Err(e.clone()),
                };
                match options.algorithm {
                    SweepAlgorithm::Igsp => {
                        let oracle = DataOracle::new(data, alpha)?;
                        igsp(&oracle, &family, &start, &search)
                    }
                    SweepAlgorithm::Scored { delta_factor } => {
                        let base =
                            ScoreConfig::from_sample_sizes(&vec![n; family.regime_count()])?;
                        let cfg = base.clone().with_delta(delta_factor * base.lambda_sum())?;
                        scored_search(&data, &family, &start, &cfg, &search)
                    }
                }
            };
            match run().and_then(|r| imec_recovered(&r.dag, &truth, &family)) {
                Ok(true) => outcome[cell].0 += 1,
                Ok(false) => {}
                Err(_) => outcome[cell].1 += 1,
            }
        }
    }
    outcome
}
