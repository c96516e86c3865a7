//! Linear Gaussian structural equation models with interventions.
//!
//! The generator draws upper-triangular DAGs, weights bounded away from
//! zero, and unit-variance noise; an intervention replaces a node's
//! assignment by an independent draw from a configurable distribution.
//! Everything is deterministic given a seed, and per-regime streams are
//! independent, so regimes and trials can be sampled in any order or in
//! parallel without changing a single bit of output.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::citest::RegimeData;
use crate::error::{Error, Result};
use crate::graph::{Arrow, Dag, InterventionFamily, NodeSet};
use crate::rng;

/// A linear Gaussian model: `X_j = sum_{i in pa(j)} w_ij X_i + noise_sd * e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemModel {
    dag: Dag,
    weights: BTreeMap<Arrow, f64>,
    noise_sd: f64,
}

impl SemModel {
    /// Requires one nonzero finite weight per arrow, no extras.
    pub fn new(dag: Dag, weights: BTreeMap<Arrow, f64>) -> Result<Self> {
        for (&arrow, &w) in &weights {
            if !dag.has_arrow(arrow.0, arrow.1) {
                return Err(Error::MissingArrow(arrow.0, arrow.1));
            }
            if w == 0.0 || !w.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "weight for {arrow:?} must be nonzero and finite, got {w}"
                )));
            }
        }
        if weights.len() != dag.arrow_count() {
            return Err(Error::SizeMismatch(weights.len(), dag.arrow_count()));
        }
        Ok(SemModel { dag, weights, noise_sd: 1.0 })
    }

    pub fn with_noise_sd(mut self, noise_sd: f64) -> Result<Self> {
        if !noise_sd.is_finite() || noise_sd <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise standard deviation must be positive, got {noise_sd}"
            )));
        }
        self.noise_sd = noise_sd;
        Ok(self)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn weights(&self) -> &BTreeMap<Arrow, f64> {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.weights.get(&(i, j)).copied()
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_sd
    }
}

/// Upper-triangular random DAG: each arrow `i -> j` with `i < j` is included
/// independently with probability `density / (p - 1)`, so `density` is the
/// expected neighborhood size of a node.
pub fn random_dag<R: Rng + ?Sized>(p: usize, density: f64, rng: &mut R) -> Result<Dag> {
    if p == 0 {
        return Err(Error::InvalidConfig("need at least one node".into()));
    }
    if !(0.0..=(p - 1) as f64).contains(&density) {
        return Err(Error::InvalidConfig(format!(
            "density must lie in [0, {}], got {density}",
            p - 1
        )));
    }
    if p == 1 || density == 0.0 {
        return Ok(Dag::empty(p));
    }
    let prob = density / (p - 1) as f64;
    let mut arrows = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            if rng.random_bool(prob) {
                arrows.push((i, j));
            }
        }
    }
    Dag::new(p, arrows)
}

/// Weights drawn uniformly from `[-1, -c) ∪ (c, 1]` per arrow, keeping every
/// coefficient bounded away from zero.
pub fn random_weights<R: Rng + ?Sized>(dag: &Dag, c: f64, rng: &mut R) -> Result<SemModel> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::InvalidConfig(format!(
            "weight floor must lie in [0, 1), got {c}"
        )));
    }
    let mut weights = BTreeMap::new();
    for arrow in dag.arrows() {
        let u: f64 = rng.random();
        let magnitude = 1.0 - u * (1.0 - c);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        weights.insert(arrow, sign * magnitude);
    }
    SemModel::new(dag.clone(), weights)
}

/// What an intervened node is replaced by: an independent normal draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterventionDist {
    pub mean: f64,
    pub sd: f64,
}

impl Default for InterventionDist {
    fn default() -> Self {
        InterventionDist { mean: 0.0, sd: 1.0 }
    }
}

impl InterventionDist {
    fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() || !self.sd.is_finite() || self.sd <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "intervention distribution needs finite mean and positive sd, got ({}, {})",
                self.mean, self.sd
            )));
        }
        Ok(())
    }
}

/// [`sample_with`] under the default standard-normal intervention draw.
pub fn sample<R: Rng + ?Sized>(
    model: &SemModel,
    n: usize,
    target: &NodeSet,
    rng: &mut R,
) -> Result<RegimeData> {
    sample_with(model, n, target, InterventionDist::default(), rng)
}

/// Draws `n` joint samples with the nodes in `target` severed from their
/// parents and replaced by `dist` draws. Per row, one normal draw is made
/// per node in index order (so the draw sequence does not depend on the
/// DAG), then assignments are solved in topological order.
pub fn sample_with<R: Rng + ?Sized>(
    model: &SemModel,
    n: usize,
    target: &NodeSet,
    dist: InterventionDist,
    rng: &mut R,
) -> Result<RegimeData> {
    let p = model.dag.p();
    if let Some(&bad) = target.iter().find(|&&v| v >= p) {
        return Err(Error::NodeOutOfRange { node: bad, p });
    }
    dist.validate()?;
    let order = model.dag.topological_order();
    let mut data = DMatrix::zeros(n, p);
    let mut noise = vec![0.0f64; p];
    for r in 0..n {
        for (j, slot) in noise.iter_mut().enumerate() {
            let z: f64 = StandardNormal.sample(rng);
            *slot = if target.contains(&j) {
                dist.mean + dist.sd * z
            } else {
                model.noise_sd * z
            };
        }
        for &j in &order {
            let mut value = noise[j];
            if !target.contains(&j) {
                for &i in model.dag.parents(j) {
                    value += model.weights[&(i, j)] * data[(r, i)];
                }
            }
            data[(r, j)] = value;
        }
    }
    RegimeData::new(data)
}

/// One dataset per regime of the family, `n` samples each, on independent
/// RNG streams derived from `(seed, regime index)`.
pub fn sample_regimes(
    model: &SemModel,
    family: &InterventionFamily,
    n: usize,
    seed: u64,
) -> Result<Vec<RegimeData>> {
    sample_regimes_with(model, family, n, InterventionDist::default(), seed)
}

/// [`sample_regimes`] with an explicit intervention distribution.
pub fn sample_regimes_with(
    model: &SemModel,
    family: &InterventionFamily,
    n: usize,
    dist: InterventionDist,
    seed: u64,
) -> Result<Vec<RegimeData>> {
    family.validate_for(model.dag.p())?;
    family
        .targets()
        .iter()
        .enumerate()
        .map(|(k, target)| {
            let mut stream = rng::derive(seed, k as u64);
            sample_with(model, n, target, dist, &mut stream)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
        rng::derive(seed, 0)
    }

    fn chain_model(p: usize, w: f64) -> SemModel {
        let dag = Dag::new(p, (0..p - 1).map(|i| (i, i + 1))).unwrap();
        let weights = (0..p - 1).map(|i| ((i, i + 1), w)).collect();
        SemModel::new(dag, weights).unwrap()
    }

    #[test]
    fn degenerate_generators() {
        let mut rng = seeded(1);
        assert_eq!(random_dag(1, 0.0, &mut rng).unwrap(), Dag::empty(1));
        assert_eq!(random_dag(5, 0.0, &mut rng).unwrap(), Dag::empty(5));
        assert!(random_dag(0, 0.0, &mut rng).is_err());
        assert!(random_dag(5, 4.5, &mut rng).is_err());
        assert!(random_dag(5, -0.1, &mut rng).is_err());
    }

    #[test]
    fn random_dag_mean_arrow_count() {
        // 45 pairs at probability 1.5/9 gives expectation 7.5.
        let mut rng = seeded(2);
        let draws = 10_000;
        let total: usize = (0..draws)
            .map(|_| random_dag(10, 1.5, &mut rng).unwrap().arrow_count())
            .sum();
        let mean = total as f64 / draws as f64;
        assert!((7.0..=8.0).contains(&mean), "mean {mean}");
    }

    #[test]
    fn weight_support() {
        let mut rng = seeded(3);
        let dag = random_dag(8, 3.0, &mut rng).unwrap();
        let model = random_weights(&dag, 0.25, &mut rng).unwrap();
        assert_eq!(model.weights().len(), dag.arrow_count());
        for &w in model.weights().values() {
            assert!(w.abs() > 0.25 && w.abs() <= 1.0, "weight {w}");
        }
        let tight = random_weights(&dag, 0.999, &mut rng).unwrap();
        for &w in tight.weights().values() {
            assert!((w.abs() - 1.0).abs() < 1.1e-3, "weight {w}");
        }
        assert!(random_weights(&dag, 1.0, &mut rng).is_err());
        assert!(random_weights(&dag, -0.5, &mut rng).is_err());
    }

    #[test]
    fn model_validation() {
        let dag = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let ok: BTreeMap<Arrow, f64> = [((0, 1), 0.5), ((1, 2), -0.7)].into();
        assert!(SemModel::new(dag.clone(), ok.clone()).is_ok());
        let missing: BTreeMap<Arrow, f64> = [((0, 1), 0.5)].into();
        assert!(SemModel::new(dag.clone(), missing).is_err());
        let extra: BTreeMap<Arrow, f64> =
            [((0, 1), 0.5), ((1, 2), -0.7), ((0, 2), 0.1)].into();
        assert!(SemModel::new(dag.clone(), extra).is_err());
        let zero: BTreeMap<Arrow, f64> = [((0, 1), 0.0), ((1, 2), -0.7)].into();
        assert!(SemModel::new(dag.clone(), zero).is_err());
        assert!(SemModel::new(dag, ok).unwrap().with_noise_sd(0.0).is_err());
    }

    #[test]
    fn intervening_everywhere_whitens_the_covariance() {
        let model = chain_model(3, 1.0);
        let all: NodeSet = (0..3).collect();
        let mut rng = seeded(4);
        let data = sample(&model, 100_000, &all, &mut rng).unwrap();
        let n = data.n() as f64;
        for a in 0..3 {
            for b in 0..3 {
                let cov = data.gram()[(a, b)] / n;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((cov - want).abs() < 0.05, "cov[{a},{b}] = {cov}");
            }
        }
    }

    #[test]
    fn chain_variance_accumulates() {
        let model = chain_model(3, 1.0);
        let mut rng = seeded(5);
        let data = sample(&model, 100_000, &NodeSet::new(), &mut rng).unwrap();
        let n = data.n() as f64;
        let var = data.gram()[(2, 2)] / n;
        assert!((2.85..=3.15).contains(&var), "var {var}");
    }

    #[test]
    fn intervention_shifts_location_and_scale() {
        let model = chain_model(2, 1.0);
        let target: NodeSet = [1].into_iter().collect();
        let dist = InterventionDist { mean: 3.0, sd: 0.5 };
        let mut rng = seeded(6);
        let data = sample_with(&model, 50_000, &target, dist, &mut rng).unwrap();
        let mean = data.samples().column(1).sum() / data.n() as f64;
        let var = data.gram()[(1, 1)] / data.n() as f64 - mean * mean;
        assert!((mean - 3.0).abs() < 0.05, "mean {mean}");
        assert!((var - 0.25).abs() < 0.05, "var {var}");
        // The severed node no longer tracks its parent.
        let corr = data.corr()[(0, 1)];
        assert!(corr.abs() < 0.05, "corr {corr}");
    }

    #[test]
    fn sampling_is_deterministic_per_seed_and_regime() {
        let model = chain_model(4, 0.8);
        let family = InterventionFamily::new(vec![
            NodeSet::new(),
            [2].into_iter().collect(),
        ])
        .unwrap();
        let a = sample_regimes(&model, &family, 500, 99).unwrap();
        let b = sample_regimes(&model, &family, 500, 99).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.samples(), y.samples());
        }
        let c = sample_regimes(&model, &family, 500, 100).unwrap();
        assert_ne!(a[0].samples(), c[0].samples());
        // Regime streams are independent: regime order does not matter.
        let solo = sample_with(
            &model,
            500,
            family.target(1).unwrap(),
            InterventionDist::default(),
            &mut rng::derive(99, 1),
        )
        .unwrap();
        assert_eq!(a[1].samples(), solo.samples());
    }

    #[test]
    fn sample_rejects_bad_targets() {
        let model = chain_model(3, 1.0);
        let bad: NodeSet = [5].into_iter().collect();
        let mut rng = seeded(7);
        assert_eq!(
            sample(&model, 10, &bad, &mut rng).map(|_| ()),
            Err(Error::NodeOutOfRange { node: 5, p: 3 })
        );
    }
}
