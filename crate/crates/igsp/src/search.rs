//! Permutation-based structure search over mixed-regime data.
//!
//! Both drivers walk the space of permutations through covered-arrow moves.
//! [`igsp`] consults a conditional-independence oracle and descends on the
//! arrow count of the minimal I-MAP; [`scored_search`] consults a penalized
//! likelihood score and ascends on it, tolerating bounded intermediate
//! losses so it can cross score plateaus.

use std::collections::HashSet;

use crate::citest::{CiOracle, RegimeData};
use crate::error::{Error, Result};
use crate::graph::{covered_arrows, Arrow, Dag, InterventionFamily};
use crate::imap::{
    conditioning_set, linear_extension, minimal_imap, reverse_covered, Permutation,
};
use crate::rng;
use crate::score::{ScoreConfig, Scorer};

/// Bounds on a single search invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Longest chain of accepted-but-uncommitted moves explored from the
    /// current root before backtracking; `None` removes the bound. Oracle
    /// runs want `None`; on finite data small bounds keep the cost
    /// predictable.
    pub max_depth: Option<usize>,
    /// Total number of runs. The first starts from the caller's permutation,
    /// each further run from a fresh random permutation; the best final
    /// objective wins.
    pub max_restarts: usize,
    /// Seed for the restart permutations (stream `r` drives run `r`).
    pub rng_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_depth: Some(4), max_restarts: 1, rng_seed: 0 }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if self.max_depth == Some(0) {
            return Err(Error::InvalidConfig("max_depth must be at least 1".into()));
        }
        if self.max_restarts == 0 {
            return Err(Error::InvalidConfig("max_restarts must be at least 1".into()));
        }
        Ok(())
    }
}

/// What a finished run optimized, with its final value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective {
    /// Minimal-I-MAP arrow count, then the number of contradicting arrows.
    Sparsity { arrows: usize, contradicting: usize },
    /// Penalized pooled Gaussian log-likelihood.
    Score(f64),
}

/// Accepted root moves, in order, plus a marker when the depth bound bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceEvent {
    /// A strictly sparser minimal I-MAP became the new root.
    SparserImap { arrows_before: usize, arrows_after: usize },
    /// A strictly higher-scoring permutation became the new root.
    ScoreImproved { score_before: f64, score_after: f64 },
    /// Some branch of the final walk was cut off by `max_depth`.
    DepthLimitReached,
}

/// A converged run: the permutation, its minimal I-MAP, and the objective.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub perm: Permutation,
    pub dag: Dag,
    pub objective: Objective,
    pub trace: Vec<TraceEvent>,
}

fn check_arrow_covered(dag: &Dag, arrow: Arrow) -> Result<()> {
    let (i, j) = arrow;
    if !dag.has_arrow(i, j) {
        return Err(Error::MissingArrow(i, j));
    }
    if !covered_arrows(dag).contains(&arrow) {
        return Err(Error::NotCovered(i, j));
    }
    Ok(())
}

/// Whether the covered arrow `i -> j` of the minimal I-MAP for `perm` can be
/// reversed without contradicting interventional evidence: every regime that
/// intervenes on `i` but not `j` must report `i` and `j` independent given
/// the permutation's conditioning set, i.e. the arrow is already absent from
/// that regime's minimal I-MAP.
pub fn is_i_covered(
    dag: &Dag,
    arrow: Arrow,
    family: &InterventionFamily,
    oracle: &dyn CiOracle,
    perm: &Permutation,
) -> Result<bool> {
    check_arrow_covered(dag, arrow)?;
    let (i, j) = arrow;
    let (with_i, _) = family.exclusive_regimes(i, j);
    if with_i.is_empty() {
        return Ok(true);
    }
    let s = conditioning_set(perm, i, j)?;
    for &k in &with_i {
        if !oracle.query(i, j, &s, k)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the orientation `i -> j` is contradicted by marginal
/// interventional evidence: some regime splits the pair, every regime
/// intervening on `i` alone sees the pair independent, and if any regime
/// intervenes on `j` alone at least one of them sees the pair dependent.
pub fn is_i_contradicting(
    i: usize,
    j: usize,
    family: &InterventionFamily,
    oracle: &dyn CiOracle,
) -> Result<bool> {
    let empty = crate::graph::NodeSet::new();
    let (with_i, with_j) = family.exclusive_regimes(i, j);
    if with_i.is_empty() && with_j.is_empty() {
        return Ok(false);
    }
    for &k in &with_i {
        if !oracle.query(i, j, &empty, k)? {
            return Ok(false);
        }
    }
    if with_j.is_empty() {
        return Ok(true);
    }
    for &k in &with_j {
        if !oracle.query(i, j, &empty, k)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Number of arrows of `dag` whose orientation is contradicted.
pub fn count_i_contradicting(
    dag: &Dag,
    family: &InterventionFamily,
    oracle: &dyn CiOracle,
) -> Result<usize> {
    let mut count = 0;
    for (i, j) in dag.arrows() {
        if is_i_contradicting(i, j, family, oracle)? {
            count += 1;
        }
    }
    Ok(count)
}

/// One node of the sparsity walk.
struct ImapNode {
    perm: Permutation,
    dag: Dag,
}

enum WalkOutcome {
    /// A strictly sparser minimal I-MAP; restart from it.
    Sparser(ImapNode),
    /// Plateau exhausted (or depth-bounded); no sparser DAG found.
    Done,
}

struct SparsityWalk<'a> {
    oracle: &'a dyn CiOracle,
    family: &'a InterventionFamily,
    max_depth: Option<usize>,
    plateau_arrows: usize,
    visited: HashSet<Vec<Arrow>>,
    best: Option<(usize, ImapNode)>,
    depth_hit: bool,
}

impl<'a> SparsityWalk<'a> {
    fn key(dag: &Dag) -> Vec<Arrow> {
        dag.arrows().collect()
    }

    /// Reversible arrows of `node`, contradicting orientations first, each
    /// group in ascending `(i, j)` order, so walks are reproducible.
    fn moves(&self, node: &ImapNode) -> Result<Vec<Arrow>> {
        let mut contradicting = Vec::new();
        let mut plain = Vec::new();
        for arrow in covered_arrows(&node.dag) {
            if !is_i_covered(&node.dag, arrow, self.family, self.oracle, &node.perm)? {
                continue;
            }
            if is_i_contradicting(arrow.0, arrow.1, self.family, self.oracle)? {
                contradicting.push(arrow);
            } else {
                plain.push(arrow);
            }
        }
        contradicting.extend(plain);
        Ok(contradicting)
    }

    fn child(&self, node: &ImapNode, arrow: Arrow) -> Result<ImapNode> {
        let reversed = reverse_covered(&node.dag, arrow)?;
        let perm = linear_extension(&reversed);
        let dag = minimal_imap(&perm, self.oracle, 0)?;
        Ok(ImapNode { perm, dag })
    }

    fn explore(&mut self, node: &ImapNode, depth: usize) -> Result<WalkOutcome> {
        if self.max_depth.is_some_and(|bound| depth >= bound) {
            self.depth_hit = true;
            return Ok(WalkOutcome::Done);
        }
        for arrow in self.moves(node)? {
            let child = self.child(node, arrow)?;
            if child.dag.arrow_count() < self.plateau_arrows {
                return Ok(WalkOutcome::Sparser(child));
            }
            // A same-order I-MAP can come out denser on noisy data; such a
            // child is neither progress nor a plateau member.
            if child.dag.arrow_count() > self.plateau_arrows {
                continue;
            }
            if !self.visited.insert(Self::key(&child.dag)) {
                continue;
            }
            let contradicting =
                count_i_contradicting(&child.dag, self.family, self.oracle)?;
            if self.best.as_ref().is_none_or(|(c, _)| contradicting < *c) {
                self.best = Some((
                    contradicting,
                    ImapNode { perm: child.perm.clone(), dag: child.dag.clone() },
                ));
            }
            if let WalkOutcome::Sparser(next) = self.explore(&child, depth + 1)? {
                return Ok(WalkOutcome::Sparser(next));
            }
        }
        Ok(WalkOutcome::Done)
    }
}

/// Interventional greedy sparsest-permutation search against a CI oracle.
///
/// From the minimal I-MAP of the starting permutation, depth-first chains of
/// reversals of arrows passing [`is_i_covered`] are explored. Any strictly
/// sparser minimal I-MAP restarts the walk as the new root; when a walk
/// exhausts its plateau, the visited plateau member with the fewest
/// contradicting arrows (first encountered on ties) is returned. Runs after
/// the first start from random permutations, and the sparsest final answer
/// (fewest contradicting arrows as tie-break) wins.
pub fn igsp(
    oracle: &dyn CiOracle,
    family: &InterventionFamily,
    start: &Permutation,
    config: &SearchConfig,
) -> Result<SearchResult> {
    config.validate()?;
    let p = start.len();
    family.validate_for(p)?;
    if oracle.regime_count() != family.regime_count() {
        return Err(Error::RegimeCountMismatch {
            have: oracle.regime_count(),
            want: family.regime_count(),
        });
    }

    let mut winner: Option<SearchResult> = None;
    for run in 0..config.max_restarts {
        let pi0 = if run == 0 {
            start.clone()
        } else {
            Permutation::random(p, &mut rng::derive(config.rng_seed, run as u64))
        };
        let result = igsp_single(oracle, family, &pi0, config.max_depth)?;
        let better = match (&result.objective, winner.as_ref().map(|w| &w.objective)) {
            (_, None) => true,
            (
                Objective::Sparsity { arrows, contradicting },
                Some(Objective::Sparsity { arrows: best_a, contradicting: best_c }),
            ) => (arrows, contradicting) < (best_a, best_c),
            _ => unreachable!("igsp runs always yield sparsity objectives"),
        };
        if better {
            winner = Some(result);
        }
    }
    Ok(winner.expect("at least one run"))
}

fn igsp_single(
    oracle: &dyn CiOracle,
    family: &InterventionFamily,
    start: &Permutation,
    max_depth: Option<usize>,
) -> Result<SearchResult> {
    let mut trace = Vec::new();
    let mut root = ImapNode {
        perm: start.clone(),
        dag: minimal_imap(start, oracle, 0)?,
    };
    loop {
        let mut walk = SparsityWalk {
            oracle,
            family,
            max_depth,
            plateau_arrows: root.dag.arrow_count(),
            visited: HashSet::from([SparsityWalk::key(&root.dag)]),
            best: None,
            depth_hit: false,
        };
        let root_contradicting = count_i_contradicting(&root.dag, family, oracle)?;
        walk.best = Some((
            root_contradicting,
            ImapNode { perm: root.perm.clone(), dag: root.dag.clone() },
        ));
        match walk.explore(&root, 0)? {
            WalkOutcome::Sparser(next) => {
                trace.push(TraceEvent::SparserImap {
                    arrows_before: root.dag.arrow_count(),
                    arrows_after: next.dag.arrow_count(),
                });
                root = next;
            }
            WalkOutcome::Done => {
                if walk.depth_hit {
                    trace.push(TraceEvent::DepthLimitReached);
                }
                let (contradicting, node) = walk.best.expect("root is always visited");
                return Ok(SearchResult {
                    objective: Objective::Sparsity {
                        arrows: node.dag.arrow_count(),
                        contradicting,
                    },
                    perm: node.perm,
                    dag: node.dag,
                    trace,
                });
            }
        }
    }
}

/// One node of the score walk.
struct ScoredNode {
    perm: Permutation,
    dag: Dag,
    score: f64,
}

enum ScoredOutcome {
    Improved(ScoredNode),
    Done,
}

struct ScoredWalk<'a> {
    scorer: &'a Scorer<'a>,
    max_depth: Option<usize>,
    root_score: f64,
    slack: f64,
    visited: HashSet<Vec<Arrow>>,
    depth_hit: bool,
}

impl<'a> ScoredWalk<'a> {
    fn key(dag: &Dag) -> Vec<Arrow> {
        dag.arrows().collect()
    }

    fn explore(&mut self, node: &ScoredNode, depth: usize) -> Result<ScoredOutcome> {
        if self.max_depth.is_some_and(|bound| depth >= bound) {
            self.depth_hit = true;
            return Ok(ScoredOutcome::Done);
        }
        for arrow in covered_arrows(&node.dag) {
            // Reorder along the reversed DAG rather than swapping the two
            // endpoints in place: only then is the per-move score change a
            // covered-reversal difference, which the slack is sized for.
            let perm = linear_extension(&reverse_covered(&node.dag, arrow)?);
            let (dag, score) = self.scorer.dag_for(&perm)?;
            if score > self.root_score {
                return Ok(ScoredOutcome::Improved(ScoredNode { perm, dag, score }));
            }
            // Each move may lose at most the slack relative to the previous
            // one; anything worse is not a plateau step.
            if score <= node.score - self.slack {
                continue;
            }
            if !self.visited.insert(Self::key(&dag)) {
                continue;
            }
            let child = ScoredNode { perm, dag, score };
            if let ScoredOutcome::Improved(next) = self.explore(&child, depth + 1)? {
                return Ok(ScoredOutcome::Improved(next));
            }
        }
        Ok(ScoredOutcome::Done)
    }
}

/// Score-based permutation search with slack.
///
/// Each permutation is scored through its best consistent DAG (per-node
/// parent selection, see [`crate::score`]). Moves reverse a covered arrow of
/// the current DAG and reorder along the result, and every depth-first step
/// may lose up to `score.delta()` relative to the permutation it came from;
/// the first strictly better permutation found becomes the new root. Because
/// `delta` exceeds the total arrow penalty, reversals that only shuffle
/// penalty terms stay reachable, which is what lets the walk leave score
/// plateaus. Restarts and the final result follow [`igsp`], except the
/// objective is the score itself.
pub fn scored_search(
    dataset: &[RegimeData],
    family: &InterventionFamily,
    start: &Permutation,
    score: &ScoreConfig,
    config: &SearchConfig,
) -> Result<SearchResult> {
    config.validate()?;
    let p = start.len();
    family.validate_for(p)?;
    let scorer = Scorer::new(dataset, family, score)?;
    if scorer.p() != p {
        return Err(Error::SizeMismatch(scorer.p(), p));
    }

    let mut winner: Option<SearchResult> = None;
    for run in 0..config.max_restarts {
        let pi0 = if run == 0 {
            start.clone()
        } else {
            Permutation::random(p, &mut rng::derive(config.rng_seed, run as u64))
        };
        let result = scored_single(&scorer, &pi0, score.delta(), config.max_depth)?;
        let better = match (&result.objective, winner.as_ref().map(|w| &w.objective)) {
            (_, None) => true,
            (Objective::Score(s), Some(Objective::Score(best))) => s > best,
            _ => unreachable!("scored runs always yield score objectives"),
        };
        if better {
            winner = Some(result);
        }
    }
    Ok(winner.expect("at least one run"))
}

fn scored_single(
    scorer: &Scorer,
    start: &Permutation,
    slack: f64,
    max_depth: Option<usize>,
) -> Result<SearchResult> {
    let mut trace = Vec::new();
    let (dag, score) = scorer.dag_for(start)?;
    let mut root = ScoredNode { perm: start.clone(), dag, score };
    loop {
        let mut walk = ScoredWalk {
            scorer,
            max_depth,
            root_score: root.score,
            slack,
            visited: HashSet::from([ScoredWalk::key(&root.dag)]),
            depth_hit: false,
        };
        match walk.explore(&root, 0)? {
            ScoredOutcome::Improved(next) => {
                trace.push(TraceEvent::ScoreImproved {
                    score_before: root.score,
                    score_after: next.score,
                });
                root = next;
            }
            ScoredOutcome::Done => {
                if walk.depth_hit {
                    trace.push(TraceEvent::DepthLimitReached);
                }
                return Ok(SearchResult {
                    objective: Objective::Score(root.score),
                    perm: root.perm,
                    dag: root.dag,
                    trace,
                });
            }
        }
    }
}
