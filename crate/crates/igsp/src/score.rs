//! Penalized Gaussian likelihood scores over mixed-regime data.
//!
//! Each node is scored by a single pooled no-intercept regression on its
//! parents, pooled across exactly the regimes that do not intervene on that
//! node. All regressions are evaluated from per-regime cross-moment (Gram)
//! matrices, so score queries cost `O(|parents|^3)` regardless of sample
//! size. The per-regime penalty charges `lambda_k` for every arrow that
//! survives in that regime's intervened graph.

use std::cell::RefCell;
use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::citest::{partial_corr_from_moments, RegimeData};
use crate::error::{Error, Result};
use crate::graph::{covered_arrows, interventional_dag, Arrow, Dag, InterventionFamily, NodeSet};

/// Per-regime penalty weights and the slack parameter for the scored search.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreConfig {
    lambdas: Vec<f64>,
    delta: f64,
}

impl ScoreConfig {
    /// Requires every weight positive and `delta` strictly above their sum,
    /// the regime under which the slack search cannot cycle.
    pub fn new(lambdas: Vec<f64>, delta: f64) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidConfig("at least one penalty weight required".into()));
        }
        for &l in &lambdas {
            if !l.is_finite() || l <= 0.0 {
                return Err(Error::InvalidConfig(format!("penalty weights must be positive, got {l}")));
            }
        }
        let total: f64 = lambdas.iter().sum();
        if !delta.is_finite() || delta <= total {
            return Err(Error::InvalidConfig(format!(
                "delta must exceed the penalty sum {total}, got {delta}"
            )));
        }
        Ok(ScoreConfig { lambdas, delta })
    }

    /// The default weights `lambda_k = ln(n_k) / n_k` with `delta` at twice
    /// their sum. Needs `n_k >= 2` so every weight is positive.
    pub fn from_sample_sizes(sample_sizes: &[usize]) -> Result<Self> {
        let lambdas: Vec<f64> = sample_sizes
            .iter()
            .map(|&n| {
                if n < 2 {
                    return Err(Error::InsufficientSamples { needed: 2, available: n });
                }
                Ok((n as f64).ln() / n as f64)
            })
            .collect::<Result<_>>()?;
        let total: f64 = lambdas.iter().sum();
        ScoreConfig::new(lambdas, 2.0 * total)
    }

    /// Same weights, different slack.
    pub fn with_delta(self, delta: f64) -> Result<Self> {
        ScoreConfig::new(self.lambdas, delta)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda_sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

fn check_dataset(dataset: &[RegimeData], family: &InterventionFamily) -> Result<usize> {
    if dataset.len() != family.regime_count() {
        return Err(Error::RegimeCountMismatch {
            have: dataset.len(),
            want: family.regime_count(),
        });
    }
    let p = dataset[0].p();
    for d in dataset {
        if d.p() != p {
            return Err(Error::ColumnMismatch(p, d.p()));
        }
    }
    family.validate_for(p)?;
    Ok(p)
}

/// Residual sum of squares of the pooled no-intercept regression of column
/// `j` on `parents`, evaluated from a cross-moment matrix.
fn rss_from_gram(m: &DMatrix<f64>, j: usize, parents: &NodeSet) -> Result<f64> {
    let degenerate = || {
        let mut vars: Vec<usize> = parents.iter().copied().collect();
        vars.push(j);
        vars.sort_unstable();
        Error::Degenerate { vars }
    };
    let rss = if parents.is_empty() {
        m[(j, j)]
    } else {
        let idx: Vec<usize> = parents.iter().copied().collect();
        let k = idx.len();
        let mut block = DMatrix::zeros(k, k);
        for (a, &x) in idx.iter().enumerate() {
            for (b, &y) in idx.iter().enumerate() {
                block[(a, b)] = m[(x, y)];
            }
        }
        let chol = nalgebra::Cholesky::new(block).ok_or_else(degenerate)?;
        let v = DVector::from_iterator(k, idx.iter().map(|&x| m[(x, j)]));
        let sol = chol.solve(&v);
        m[(j, j)] - v.dot(&sol)
    };
    if !rss.is_finite() || rss <= 1e-12 * m[(j, j)].max(1e-300) {
        return Err(degenerate());
    }
    Ok(rss)
}

fn pooled_gram(dataset: &[RegimeData], regimes: &std::collections::BTreeSet<usize>) -> (DMatrix<f64>, usize) {
    let p = dataset[0].p();
    let mut m = DMatrix::zeros(p, p);
    let mut n = 0;
    for &k in regimes {
        m += dataset[k].gram();
        n += dataset[k].n();
    }
    (m, n)
}

/// Gaussian log-likelihood contribution of node `j` with the given parent
/// set: `-(n_j / n) / 2 * ln(rss / n_j)`, where the regression pools the
/// regimes that leave `j` unintervened, `n_j` counts their samples, and `n`
/// counts all samples. Constants shared by every DAG are dropped.
pub fn node_score(
    j: usize,
    parents: &NodeSet,
    dataset: &[RegimeData],
    family: &InterventionFamily,
) -> Result<f64> {
    let p = check_dataset(dataset, family)?;
    if j >= p {
        return Err(Error::NodeOutOfRange { node: j, p });
    }
    if parents.contains(&j) {
        return Err(Error::SelfLoop(j));
    }
    for &v in parents {
        if v >= p {
            return Err(Error::NodeOutOfRange { node: v, p });
        }
    }
    let pooled_set = family.regimes_not_targeting(j);
    let (gram, n_pooled) = pooled_gram(dataset, &pooled_set);
    if n_pooled < parents.len() + 2 {
        return Err(Error::InsufficientSamples { needed: parents.len() + 2, available: n_pooled });
    }
    let n_total: usize = dataset.iter().map(RegimeData::n).sum();
    let rss = rss_from_gram(&gram, j, parents)?;
    Ok(-0.5 * (n_pooled as f64 / n_total as f64) * (rss / n_pooled as f64).ln())
}

/// Penalized score of a DAG under the intervention family: the sum of
/// [`node_score`] terms minus `sum_k lambda_k * |G_k|`, where `|G_k|` counts
/// the arrows remaining after severing regime `k`'s targets.
pub fn interventional_bic(
    dag: &Dag,
    dataset: &[RegimeData],
    family: &InterventionFamily,
    config: &ScoreConfig,
) -> Result<f64> {
    let p = check_dataset(dataset, family)?;
    if dag.p() != p {
        return Err(Error::SizeMismatch(dag.p(), p));
    }
    if config.lambdas.len() != family.regime_count() {
        return Err(Error::RegimeCountMismatch {
            have: config.lambdas.len(),
            want: family.regime_count(),
        });
    }
    let mut total = 0.0;
    for j in 0..p {
        total += node_score(j, dag.parents(j), dataset, family)?;
    }
    for (k, target) in family.targets().iter().enumerate() {
        total -= config.lambdas[k] * interventional_dag(dag, target)?.arrow_count() as f64;
    }
    Ok(total)
}

/// Change in [`interventional_bic`] from reversing the covered arrow
/// `(i, j)`, computed in closed form. Only the two endpoint regressions
/// move, and their residual ratios reduce to partial correlations of
/// `(i, j)` given the shared parents `S`, each taken on the pooled moments
/// of the regimes that leave the regression's target unintervened. With a
/// purely observational family the two terms cancel exactly.
pub fn score_diff_covered_reversal(
    dag: &Dag,
    arrow: Arrow,
    dataset: &[RegimeData],
    family: &InterventionFamily,
    config: &ScoreConfig,
) -> Result<f64> {
    let p = check_dataset(dataset, family)?;
    if dag.p() != p {
        return Err(Error::SizeMismatch(dag.p(), p));
    }
    if config.lambdas.len() != family.regime_count() {
        return Err(Error::RegimeCountMismatch {
            have: config.lambdas.len(),
            want: family.regime_count(),
        });
    }
    let (i, j) = arrow;
    if !dag.has_arrow(i, j) {
        return Err(Error::MissingArrow(i, j));
    }
    if !covered_arrows(dag).contains(&arrow) {
        return Err(Error::NotCovered(i, j));
    }
    let shared: NodeSet = dag.parents(i).clone();
    let n_total: usize = dataset.iter().map(RegimeData::n).sum();

    let log_term = |node: usize| -> Result<(f64, f64)> {
        let pooled_set = family.regimes_not_targeting(node);
        let (gram, n_pooled) = pooled_gram(dataset, &pooled_set);
        let rho = partial_corr_from_moments(&gram, i, j, &shared)?;
        let one_minus = 1.0 - rho * rho;
        if !one_minus.is_finite() || one_minus <= 0.0 {
            let mut vars: Vec<usize> = shared.iter().copied().collect();
            vars.push(i);
            vars.push(j);
            vars.sort_unstable();
            return Err(Error::Degenerate { vars });
        }
        Ok((n_pooled as f64 / n_total as f64, one_minus.ln()))
    };

    let (weight_i, log_i) = log_term(i)?;
    let (weight_j, log_j) = log_term(j)?;
    let (with_i, with_j) = family.exclusive_regimes(i, j);
    let penalty_shift: f64 = with_i.iter().map(|&k| config.lambdas[k]).sum::<f64>()
        - with_j.iter().map(|&k| config.lambdas[k]).sum::<f64>();
    Ok(-0.5 * weight_i * log_i + 0.5 * weight_j * log_j + penalty_shift)
}

/// Incremental scorer used by the permutation search: pooled Gram matrix and
/// arrow penalty per node, plus a memo of node objectives, so repeated DAG
/// builds only pay for new parent sets.
pub(crate) struct Scorer<'a> {
    p: usize,
    nodes: Vec<NodeContext>,
    #[allow(dead_code)]
    config: &'a ScoreConfig,
    cache: RefCell<HashMap<(usize, Vec<usize>), f64>>,
}

struct NodeContext {
    gram: DMatrix<f64>,
    n_pooled: f64,
    weight: f64,
    arrow_penalty: f64,
}

impl<'a> Scorer<'a> {
    pub fn new(
        dataset: &[RegimeData],
        family: &InterventionFamily,
        config: &'a ScoreConfig,
    ) -> Result<Self> {
        let p = check_dataset(dataset, family)?;
        if config.lambdas.len() != family.regime_count() {
            return Err(Error::RegimeCountMismatch {
                have: config.lambdas.len(),
                want: family.regime_count(),
            });
        }
        let n_total: usize = dataset.iter().map(RegimeData::n).sum();
        let nodes = (0..p)
            .map(|j| {
                let pooled_set = family.regimes_not_targeting(j);
                let (gram, n_pooled) = pooled_gram(dataset, &pooled_set);
                let arrow_penalty: f64 =
                    pooled_set.iter().map(|&k| config.lambdas[k]).sum();
                NodeContext {
                    gram,
                    n_pooled: n_pooled as f64,
                    weight: n_pooled as f64 / n_total as f64,
                    arrow_penalty,
                }
            })
            .collect();
        Ok(Scorer { p, nodes, config, cache: RefCell::new(HashMap::new()) })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Node score minus the arrow penalties attributable to the node's
    /// incoming arrows; DAG score is the sum of these over nodes.
    pub fn node_objective(&self, j: usize, parents: &NodeSet) -> Result<f64> {
        let key = (j, parents.iter().copied().collect::<Vec<usize>>());
        if let Some(&hit) = self.cache.borrow().get(&key) {
            return Ok(hit);
        }
        let ctx = &self.nodes[j];
        if (ctx.n_pooled as usize) < parents.len() + 2 {
            return Err(Error::InsufficientSamples {
                needed: parents.len() + 2,
                available: ctx.n_pooled as usize,
            });
        }
        let rss = rss_from_gram(&ctx.gram, j, parents)?;
        let value = -0.5 * ctx.weight * (rss / ctx.n_pooled).ln()
            - ctx.arrow_penalty * parents.len() as f64;
        self.cache.borrow_mut().insert(key, value);
        Ok(value)
    }

    /// Best-scoring parent set for `j` drawn from `candidates`: exhaustive
    /// over subsets of size at most four, then greedy single additions while
    /// the objective improves. This is the deliberate compromise that keeps
    /// per-permutation DAG construction polynomial.
    pub fn best_parents(&self, j: usize, candidates: &[usize]) -> Result<(NodeSet, f64)> {
        let mut sorted: Vec<usize> = candidates.to_vec();
        sorted.sort_unstable();
        let exhaustive_cap = 4.min(sorted.len());
        let mut best_set: NodeSet = NodeSet::new();
        let mut best = self.node_objective(j, &best_set)?;
        for size in 1..=exhaustive_cap {
            for combo in combinations(&sorted, size) {
                let parents: NodeSet = combo.iter().copied().collect();
                let value = self.node_objective(j, &parents)?;
                if value > best {
                    best = value;
                    best_set = parents;
                }
            }
        }
        if sorted.len() > exhaustive_cap {
            loop {
                let mut gain: Option<(f64, usize)> = None;
                for &c in &sorted {
                    if best_set.contains(&c) {
                        continue;
                    }
                    let mut trial = best_set.clone();
                    trial.insert(c);
                    let value = self.node_objective(j, &trial)?;
                    if value > best && gain.is_none_or(|(g, _)| value > g) {
                        gain = Some((value, c));
                    }
                }
                match gain {
                    Some((value, c)) => {
                        best = value;
                        best_set.insert(c);
                    }
                    None => break,
                }
            }
        }
        Ok((best_set, best))
    }

    /// Highest-scoring DAG consistent with the order, built by independent
    /// per-node parent selection over each node's predecessors. Returns the
    /// DAG and its penalized score.
    pub fn dag_for(&self, perm: &crate::imap::Permutation) -> Result<(Dag, f64)> {
        let mut arrows = Vec::new();
        let mut total = 0.0;
        for pos in 0..perm.len() {
            let j = perm.node_at(pos);
            let (parents, value) = self.best_parents(j, &perm.order()[..pos])?;
            total += value;
            arrows.extend(parents.iter().map(|&u| (u, j)));
        }
        Ok((Dag::new(self.p, arrows).expect("order-consistent arrows are acyclic"), total))
    }
}

/// Lexicographic `size`-subsets of `items` (assumed sorted).
fn combinations(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(idx.iter().map(|&k| items[k]).collect());
        // Advance the index vector.
        let mut pos = size;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] != pos + items.len() - size {
                break;
            }
        }
        idx[pos] += 1;
        for k in pos + 1..size {
            idx[k] = idx[k - 1] + 1;
        }
    }
}
