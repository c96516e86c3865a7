//! Structural invariants checked exhaustively on small graphs and by
//! randomized search over larger ones.

use std::collections::BTreeSet;

use igsp::citest::{gaussian_ci_test, CiOracle};
use igsp::graph::{
    all_dags, covered_arrows, cpdag, d_separated, d_separated_moral, markov_equivalent,
};
use igsp::imap::{conditioning_set, minimal_imap};
use igsp::search::{igsp, is_i_covered, TraceEvent};
use igsp::sem::{random_dag, random_weights, sample_regimes};
use igsp::{Dag, DsepOracle, Error, InterventionFamily, NodeSet, Permutation, SearchConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn set(nodes: &[usize]) -> NodeSet {
    nodes.iter().copied().collect()
}

fn arrows_of(dag: &Dag) -> BTreeSet<(usize, usize)> {
    dag.arrows().collect()
}

/// All subsets of `pool`, as node sets.
fn subsets(pool: &[usize]) -> Vec<NodeSet> {
    let mut out = vec![NodeSet::new()];
    for &v in pool {
        let mut grown: Vec<NodeSet> = out
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.insert(v);
                s
            })
            .collect();
        out.append(&mut grown);
    }
    out
}

#[test]
fn dsep_implementations_agree_exhaustively_on_three_nodes() {
    for dag in all_dags(3) {
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let rest: Vec<usize> = (0..3).filter(|v| *v != i && *v != j).collect();
                for s in subsets(&rest) {
                    let a = d_separated(&dag, &set(&[i]), &set(&[j]), &s).unwrap();
                    let b = d_separated_moral(&dag, &set(&[i]), &set(&[j]), &s).unwrap();
                    assert_eq!(a, b, "{:?}: {i} vs {j} given {s:?}", arrows_of(&dag));
                }
            }
        }
    }
}

/// Bundle for the randomized graph properties: a seeded DAG plus a query.
#[derive(Debug, Clone)]
struct GraphCase {
    seed: u64,
    p: usize,
    density: f64,
}

fn graph_case() -> impl Strategy<Value = GraphCase> {
    (any::<u64>(), 2usize..7, 0.5f64..2.5).prop_map(|(seed, p, density)| GraphCase {
        seed,
        p,
        density: density.min((p - 1) as f64),
    })
}

fn build(case: &GraphCase) -> Dag {
    let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
    random_dag(case.p, case.density, &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dsep_implementations_agree(case in graph_case(), qi in 0usize..7, qj in 0usize..7, mask in 0usize..128) {
        let dag = build(&case);
        let (i, j) = (qi % case.p, qj % case.p);
        prop_assume!(i != j);
        let s: NodeSet =
            (0..case.p).filter(|v| *v != i && *v != j && mask >> v & 1 == 1).collect();
        let a = d_separated(&dag, &set(&[i]), &set(&[j]), &s).unwrap();
        let b = d_separated_moral(&dag, &set(&[i]), &set(&[j]), &s).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn local_markov_property_holds(case in graph_case()) {
        let dag = build(&case);
        for v in 0..case.p {
            let parents = dag.parents(v).clone();
            let others: NodeSet = dag
                .nondescendants(v)
                .into_iter()
                .filter(|u| !parents.contains(u))
                .collect();
            if others.is_empty() {
                continue;
            }
            prop_assert!(d_separated(&dag, &set(&[v]), &others, &parents).unwrap());
        }
    }

    #[test]
    fn minimal_imap_of_a_topological_order_is_the_truth(case in graph_case()) {
        let dag = build(&case);
        let family = InterventionFamily::observational();
        let oracle = DsepOracle::new(&dag, &family).unwrap();
        let perm = Permutation::new(dag.topological_order()).unwrap();
        let imap = minimal_imap(&perm, &oracle, 0).unwrap();
        prop_assert_eq!(arrows_of(&imap), arrows_of(&dag));
    }

    #[test]
    fn covered_reversals_stay_in_the_class(case in graph_case()) {
        let dag = build(&case);
        for (i, j) in covered_arrows(&dag) {
            let reversed = dag.with_arrow_reversed(i, j).unwrap();
            prop_assert!(markov_equivalent(&dag, &reversed).unwrap());
        }
    }

    #[test]
    fn i_covered_arrows_are_covered(case in graph_case(), target in 0usize..7, perm_seed in any::<u64>()) {
        let dag = build(&case);
        let family =
            InterventionFamily::new(vec![NodeSet::new(), set(&[target % case.p])]).unwrap();
        let oracle = DsepOracle::new(&dag, &family).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        let perm = Permutation::random(case.p, &mut rng);
        let imap = minimal_imap(&perm, &oracle, 0).unwrap();
        let covered = covered_arrows(&imap);
        for arrow in imap.arrows() {
            let verdict = is_i_covered(&imap, arrow, &family, &oracle, &perm);
            if covered.contains(&arrow) {
                verdict.unwrap();
            } else {
                prop_assert!(matches!(verdict, Err(Error::NotCovered(_, _))));
            }
        }
    }

    #[test]
    fn igsp_only_ever_shrinks_the_imap(case in graph_case(), start_seed in any::<u64>()) {
        let dag = build(&case);
        let family = InterventionFamily::observational();
        let oracle = DsepOracle::new(&dag, &family).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(start_seed);
        let start = Permutation::random(case.p, &mut rng);
        let config = SearchConfig { max_depth: None, max_restarts: 1, rng_seed: 0 };
        let result = igsp(&oracle, &family, &start, &config).unwrap();
        let mut last = usize::MAX;
        for event in &result.trace {
            if let TraceEvent::SparserImap { arrows_before, arrows_after } = event {
                prop_assert!(arrows_after < arrows_before);
                prop_assert!(*arrows_before <= last);
                last = *arrows_after;
            }
        }
        // The answer is itself the minimal I-MAP of the returned order, and
        // it can never beat the truth for sparsity.
        let check = minimal_imap(&result.perm, &oracle, 0).unwrap();
        prop_assert_eq!(arrows_of(&check), arrows_of(&result.dag));
        // An independence map never beats the truth for sparsity.
        prop_assert!(result.dag.arrow_count() >= dag.arrow_count());
    }

    #[test]
    fn exclusive_regime_sets_are_disjoint_and_correct(
        ts in proptest::collection::vec(0usize..5, 0..4),
        qi in 0usize..5,
        qj in 0usize..5,
    ) {
        let mut targets = vec![NodeSet::new()];
        targets.extend(ts.iter().map(|t| set(&[*t])));
        let family = InterventionFamily::new(targets).unwrap();
        prop_assume!(qi != qj);
        let (with_i, with_j) = family.exclusive_regimes(qi, qj);
        prop_assert!(with_i.is_disjoint(&with_j));
        for k in &with_i {
            let t = family.target(*k).unwrap();
            prop_assert!(t.contains(&qi) && !t.contains(&qj));
        }
        for k in &with_j {
            let t = family.target(*k).unwrap();
            prop_assert!(t.contains(&qj) && !t.contains(&qi));
        }
    }

    #[test]
    fn conditioning_set_is_the_prefix_without_the_pair(order_seed in any::<u64>(), p in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
        let perm = Permutation::random(p, &mut rng);
        for i in 0..p {
            for j in 0..p {
                if i == j {
                    continue;
                }
                let s = conditioning_set(&perm, i, j).unwrap();
                let cut = perm.position_of(i).unwrap().max(perm.position_of(j).unwrap());
                let expect: NodeSet = perm.order()[..cut]
                    .iter()
                    .copied()
                    .filter(|v| *v != i && *v != j)
                    .collect();
                prop_assert_eq!(s, expect);
            }
        }
    }
}

#[test]
fn class_membership_matches_shared_essential_graphs_on_three_nodes() {
    let dags = all_dags(3);
    for g in &dags {
        for h in &dags {
            let same_class = markov_equivalent(g, h).unwrap();
            assert_eq!(same_class, cpdag(g) == cpdag(h));
        }
    }
}

#[test]
fn dsep_oracle_is_symmetric_and_repeatable() {
    let dag = Dag::new(4, [(0, 1), (1, 2), (0, 3), (3, 2)]).unwrap();
    let family = InterventionFamily::new(vec![NodeSet::new(), set(&[2])]).unwrap();
    let oracle = DsepOracle::new(&dag, &family).unwrap();
    for k in 0..2 {
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let rest: Vec<usize> = (0..4).filter(|v| *v != i && *v != j).collect();
                for s in subsets(&rest) {
                    let a = oracle.query(i, j, &s, k).unwrap();
                    assert_eq!(a, oracle.query(j, i, &s, k).unwrap());
                    assert_eq!(a, oracle.query(i, j, &s, k).unwrap());
                }
            }
        }
    }
}

#[test]
fn fisher_z_is_symmetric_in_the_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let dag = random_dag(4, 1.5, &mut rng).unwrap();
    let model = random_weights(&dag, 0.25, &mut rng).unwrap();
    let family = InterventionFamily::observational();
    let data = &sample_regimes(&model, &family, 500, 3).unwrap()[0];
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let rest: Vec<usize> = (0..4).filter(|v| *v != i && *v != j).collect();
            for s in subsets(&rest) {
                assert_eq!(
                    gaussian_ci_test(data, i, j, &s, 0.05).unwrap(),
                    gaussian_ci_test(data, j, i, &s, 0.05).unwrap()
                );
            }
        }
    }
}

#[test]
fn data_oracle_agrees_with_dsep_on_well_separated_signals() {
    use igsp::DataOracle;

    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let mut agree = 0usize;
    let mut total = 0usize;
    for round in 0..20 {
        let dag = random_dag(4, 1.5, &mut rng).unwrap();
        let model = random_weights(&dag, 0.6, &mut rng).unwrap();
        let family = InterventionFamily::new(vec![NodeSet::new(), set(&[round % 4])]).unwrap();
        let dataset = sample_regimes(&model, &family, 50_000, round as u64).unwrap();
        let data_oracle = DataOracle::new(dataset, 1e-3).unwrap();
        let exact = DsepOracle::new(&dag, &family).unwrap();
        for k in 0..2 {
            for i in 0..4 {
                for j in i + 1..4 {
                    let rest: Vec<usize> =
                        (0..4).filter(|v| *v != i && *v != j).collect();
                    for s in subsets(&rest) {
                        total += 1;
                        if data_oracle.query(i, j, &s, k).unwrap()
                            == exact.query(i, j, &s, k).unwrap()
                        {
                            agree += 1;
                        }
                    }
                }
            }
        }
    }
    let rate = agree as f64 / total as f64;
    assert!(rate >= 0.95, "agreement rate {rate:.3} over {total} queries");
}
