//! Directed acyclic graphs, d-separation, covered arrows, intervention
//! subgraphs, and (interventional) Markov equivalence.
//!
//! Nodes are dense integers `0..p`. External naming is the CLI's business.
//! Equivalence classes are computed by enumeration (covered-arrow reversals),
//! which is exact and fast at the graph sizes this crate targets.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// A set of node indices. `BTreeSet` keeps iteration order deterministic.
pub type NodeSet = BTreeSet<usize>;

/// A directed edge `(tail, head)`.
pub type Arrow = (usize, usize);

/// Immutable DAG on nodes `0..p`. Acyclicity is validated eagerly at
/// construction; every `Dag` in circulation is a real DAG.
#[derive(Clone, Debug)]
pub struct Dag {
    p: usize,
    arrows: BTreeSet<Arrow>,
    parents: Vec<NodeSet>,
    children: Vec<NodeSet>,
}

impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.arrows == other.arrows
    }
}

impl Eq for Dag {}

impl Hash for Dag {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.arrows.hash(state);
    }
}

impl Dag {
    /// Builds a DAG, rejecting out-of-range nodes, self-loops, and cycles.
    pub fn new(p: usize, arrows: impl IntoIterator<Item = Arrow>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in arrows {
            if i >= p {
                return Err(Error::NodeOutOfRange { node: i, p });
            }
            if j >= p {
                return Err(Error::NodeOutOfRange { node: j, p });
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            set.insert((i, j));
        }
        let mut parents = vec![NodeSet::new(); p];
        let mut children = vec![NodeSet::new(); p];
        for &(i, j) in &set {
            parents[j].insert(i);
            children[i].insert(j);
        }
        let dag = Dag { p, arrows: set, parents, children };
        if dag.topological_order().len() != p {
            return Err(Error::CyclicGraph);
        }
        Ok(dag)
    }

    /// The edgeless DAG on `p` nodes.
    pub fn empty(p: usize) -> Self {
        Dag::new(p, []).expect("empty graph is acyclic")
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    /// Arrows in ascending `(tail, head)` order.
    pub fn arrows(&self) -> impl Iterator<Item = Arrow> + '_ {
        self.arrows.iter().copied()
    }

    #[inline]
    pub fn has_arrow(&self, i: usize, j: usize) -> bool {
        self.arrows.contains(&(i, j))
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.has_arrow(i, j) || self.has_arrow(j, i)
    }

    #[inline]
    pub fn parents(&self, j: usize) -> &NodeSet {
        &self.parents[j]
    }

    #[inline]
    pub fn children(&self, i: usize) -> &NodeSet {
        &self.children[i]
    }

    /// Smallest-node-first topological order (Kahn's algorithm with a
    /// min-heap). Returns fewer than `p` nodes iff the arrow set is cyclic,
    /// which `new` uses as its acyclicity check.
    pub fn topological_order(&self) -> Vec<usize> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        let mut indegree: Vec<usize> = (0..self.p).map(|v| self.parents[v].len()).collect();
        let mut ready: BinaryHeap<Reverse<usize>> = (0..self.p)
            .filter(|&v| indegree[v] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(self.p);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &c in &self.children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        order
    }

    /// Strict descendants of `v` (excluding `v`).
    pub fn descendants(&self, v: usize) -> NodeSet {
        let mut out = NodeSet::new();
        let mut stack: Vec<usize> = self.children[v].iter().copied().collect();
        while let Some(u) = stack.pop() {
            if out.insert(u) {
                stack.extend(self.children[u].iter().copied());
            }
        }
        out
    }

    /// Nodes that are neither `v` nor descendants of `v`.
    pub fn nondescendants(&self, v: usize) -> NodeSet {
        let desc = self.descendants(v);
        (0..self.p).filter(|&u| u != v && !desc.contains(&u)).collect()
    }

    /// Mask of nodes that are in `seed` or have a directed path into `seed`.
    fn ancestral_mask(&self, seed: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut mask = vec![false; self.p];
        let mut stack: Vec<usize> = seed.into_iter().collect();
        while let Some(v) = stack.pop() {
            if !mask[v] {
                mask[v] = true;
                stack.extend(self.parents[v].iter().copied());
            }
        }
        mask
    }

    /// The same graph with one arrow replaced by its reversal. Fails with
    /// `CyclicGraph` when the reversal closes a cycle; use
    /// [`crate::imap::reverse_covered`] for the always-safe covered case.
    pub fn with_arrow_reversed(&self, i: usize, j: usize) -> Result<Dag> {
        if !self.has_arrow(i, j) {
            return Err(Error::MissingArrow(i, j));
        }
        let arrows = self
            .arrows()
            .filter(|&a| a != (i, j))
            .chain(std::iter::once((j, i)));
        Dag::new(self.p, arrows)
    }
}

fn check_query_sets(dag: &Dag, a: &NodeSet, b: &NodeSet, c: &NodeSet) -> Result<()> {
    for &v in a.iter().chain(b).chain(c) {
        if v >= dag.p {
            return Err(Error::NodeOutOfRange { node: v, p: dag.p });
        }
    }
    let disjoint = a.intersection(b).next().is_none()
        && a.intersection(c).next().is_none()
        && b.intersection(c).next().is_none();
    if !disjoint {
        return Err(Error::OverlappingSets);
    }
    Ok(())
}

/// Tests whether `a` and `b` are d-separated given `c`, by ball-passing
/// reachability over the states (node, entered-from-parent?). Linear in the
/// size of the graph. Empty `a` or `b` is vacuously separated.
pub fn d_separated(dag: &Dag, a: &NodeSet, b: &NodeSet, c: &NodeSet) -> Result<bool> {
    check_query_sets(dag, a, b, c)?;
    if a.is_empty() || b.is_empty() {
        return Ok(true);
    }
    let in_c = set_mask(dag.p, c);
    let in_b = set_mask(dag.p, b);
    // A collider is open iff it is in c or has a descendant in c, i.e. iff it
    // is an ancestor of c.
    let anc_c = dag.ancestral_mask(c.iter().copied());
    let mut seen_up = vec![false; dag.p];
    let mut seen_down = vec![false; dag.p];
    // (node, true) = entered along an arrow from a parent (moving down).
    let mut stack: Vec<(usize, bool)> = a.iter().map(|&v| (v, false)).collect();
    while let Some((v, from_parent)) = stack.pop() {
        let seen = if from_parent { &mut seen_down } else { &mut seen_up };
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if in_b[v] {
            return Ok(false);
        }
        if from_parent {
            if anc_c[v] {
                stack.extend(dag.parents(v).iter().map(|&u| (u, false)));
            }
            if !in_c[v] {
                stack.extend(dag.children(v).iter().map(|&u| (u, true)));
            }
        } else if !in_c[v] {
            stack.extend(dag.parents(v).iter().map(|&u| (u, false)));
            stack.extend(dag.children(v).iter().map(|&u| (u, true)));
        }
    }
    Ok(true)
}

/// Same decision as [`d_separated`], computed the classical way: restrict to
/// the ancestral set of `a ∪ b ∪ c`, moralize, delete `c`, and test plain
/// reachability. Kept as an independent second route; the test suite checks
/// the two agree on every small graph.
pub fn d_separated_moral(dag: &Dag, a: &NodeSet, b: &NodeSet, c: &NodeSet) -> Result<bool> {
    check_query_sets(dag, a, b, c)?;
    if a.is_empty() || b.is_empty() {
        return Ok(true);
    }
    let keep = dag.ancestral_mask(a.iter().chain(b).chain(c).copied());
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); dag.p];
    let connect = |adj: &mut Vec<HashSet<usize>>, x: usize, y: usize| {
        adj[x].insert(y);
        adj[y].insert(x);
    };
    for (i, j) in dag.arrows() {
        if keep[i] && keep[j] {
            connect(&mut adj, i, j);
        }
    }
    for (v, &kept) in keep.iter().enumerate() {
        if !kept {
            continue;
        }
        // Marry co-parents. Parents of a kept node are kept (ancestral set).
        let pa: Vec<usize> = dag.parents(v).iter().copied().collect();
        for (x, &u) in pa.iter().enumerate() {
            for &w in &pa[x + 1..] {
                connect(&mut adj, u, w);
            }
        }
    }
    let in_c = set_mask(dag.p, c);
    let in_b = set_mask(dag.p, b);
    let mut seen = vec![false; dag.p];
    let mut queue: VecDeque<usize> = a.iter().copied().collect();
    for &v in a {
        seen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        if in_b[v] {
            return Ok(false);
        }
        for &u in &adj[v] {
            if !seen[u] && !in_c[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    Ok(true)
}

fn set_mask(p: usize, s: &NodeSet) -> Vec<bool> {
    let mut mask = vec![false; p];
    for &v in s {
        mask[v] = true;
    }
    mask
}

/// The DAG observed under an intervention: arrows into intervened nodes are
/// severed, everything else is kept.
pub fn interventional_dag(dag: &Dag, target: &NodeSet) -> Result<Dag> {
    for &v in target {
        if v >= dag.p() {
            return Err(Error::NodeOutOfRange { node: v, p: dag.p() });
        }
    }
    let arrows = dag.arrows().filter(|(_, j)| !target.contains(j));
    Ok(Dag::new(dag.p(), arrows).expect("subgraph of a DAG is a DAG"))
}

/// Arrows `i -> j` with `pa(j) = pa(i) ∪ {i}`. Reversing exactly these
/// arrows stays inside the Markov equivalence class.
pub fn covered_arrows(dag: &Dag) -> BTreeSet<Arrow> {
    dag.arrows()
        .filter(|&(i, j)| {
            let pi = dag.parents(i);
            let pj = dag.parents(j);
            pj.len() == pi.len() + 1 && pj.contains(&i) && pi.is_subset(pj)
        })
        .collect()
}

/// Undirected edge set, each pair stored as `(min, max)`.
pub fn skeleton(dag: &Dag) -> BTreeSet<(usize, usize)> {
    dag.arrows().map(|(i, j)| (i.min(j), i.max(j))).collect()
}

/// Immoralities `i -> k <- j` with `i`, `j` non-adjacent, reported as
/// `(min(i, j), k, max(i, j))`.
pub fn immoralities(dag: &Dag) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for k in 0..dag.p() {
        let pa: Vec<usize> = dag.parents(k).iter().copied().collect();
        for (x, &i) in pa.iter().enumerate() {
            for &j in &pa[x + 1..] {
                if !dag.adjacent(i, j) {
                    out.insert((i, k, j));
                }
            }
        }
    }
    out
}

/// Markov equivalence: same skeleton and same immoralities.
pub fn markov_equivalent(g: &Dag, h: &Dag) -> Result<bool> {
    if g.p() != h.p() {
        return Err(Error::SizeMismatch(g.p(), h.p()));
    }
    Ok(skeleton(g) == skeleton(h) && immoralities(g) == immoralities(h))
}

/// An ordered list of intervention target sets; regime 0 is always the
/// observational one (empty target set).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterventionFamily {
    targets: Vec<NodeSet>,
}

impl InterventionFamily {
    pub fn new(targets: Vec<NodeSet>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if !targets[0].is_empty() {
            return Err(Error::ObservationalFirst);
        }
        Ok(InterventionFamily { targets })
    }

    /// The purely observational family: a single empty regime.
    pub fn observational() -> Self {
        InterventionFamily { targets: vec![NodeSet::new()] }
    }

    /// Total number of regimes, observational included.
    #[inline]
    pub fn regime_count(&self) -> usize {
        self.targets.len()
    }

    pub fn target(&self, regime: usize) -> Result<&NodeSet> {
        self.targets.get(regime).ok_or(Error::RegimeOutOfRange {
            regime,
            regimes: self.targets.len(),
        })
    }

    pub fn targets(&self) -> &[NodeSet] {
        &self.targets
    }

    /// Checks every target node is a valid node of a graph on `p` nodes.
    pub fn validate_for(&self, p: usize) -> Result<()> {
        for t in &self.targets {
            for &v in t {
                if v >= p {
                    return Err(Error::NodeOutOfRange { node: v, p });
                }
            }
        }
        Ok(())
    }

    /// Regime indices whose target contains `i` but not `j`, and vice versa.
    /// Regime 0 never appears in either set.
    pub fn exclusive_regimes(&self, i: usize, j: usize) -> (BTreeSet<usize>, BTreeSet<usize>) {
        let mut with_i = BTreeSet::new();
        let mut with_j = BTreeSet::new();
        for (k, t) in self.targets.iter().enumerate() {
            match (t.contains(&i), t.contains(&j)) {
                (true, false) => {
                    with_i.insert(k);
                }
                (false, true) => {
                    with_j.insert(k);
                }
                _ => {}
            }
        }
        (with_i, with_j)
    }

    /// Regimes whose target does not contain `j` (always includes regime 0).
    pub fn regimes_not_targeting(&self, j: usize) -> BTreeSet<usize> {
        self.targets
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.contains(&j))
            .map(|(k, _)| k)
            .collect()
    }
}

/// Interventional Markov equivalence: Markov equivalent, and for every
/// regime the intervened subgraphs have equal skeletons.
pub fn i_markov_equivalent(g: &Dag, h: &Dag, family: &InterventionFamily) -> Result<bool> {
    if g.p() != h.p() {
        return Err(Error::SizeMismatch(g.p(), h.p()));
    }
    family.validate_for(g.p())?;
    if !markov_equivalent(g, h)? {
        return Ok(false);
    }
    for t in family.targets() {
        let gs = skeleton(&interventional_dag(g, t)?);
        let hs = skeleton(&interventional_dag(h, t)?);
        if gs != hs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All members of the Markov equivalence class of `dag`: the closure of
/// `dag` under covered-arrow reversals, discovered breadth-first. Visited
/// graphs are memoized by arrow set, so each member is expanded once.
pub fn enumerate_mec(dag: &Dag) -> Vec<Dag> {
    let mut seen: HashSet<BTreeSet<Arrow>> = HashSet::new();
    seen.insert(dag.arrows().collect());
    let mut queue = VecDeque::from([dag.clone()]);
    let mut members = Vec::new();
    while let Some(g) = queue.pop_front() {
        for (i, j) in covered_arrows(&g) {
            let rev = g
                .with_arrow_reversed(i, j)
                .expect("covered reversal keeps the graph acyclic");
            if seen.insert(rev.arrows().collect()) {
                queue.push_back(rev);
            }
        }
        members.push(g);
    }
    members
}

/// Mixed graph summarizing an equivalence class: arrows oriented the same
/// way in every member stay directed, the rest become undirected edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pdag {
    p: usize,
    directed: BTreeSet<Arrow>,
    undirected: BTreeSet<(usize, usize)>,
}

impl Pdag {
    /// Undirected pairs are normalized to `(min, max)`; a pair may not be
    /// both directed and undirected.
    pub fn new(
        p: usize,
        directed: impl IntoIterator<Item = Arrow>,
        undirected: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut dir = BTreeSet::new();
        for (i, j) in directed {
            if i >= p || j >= p {
                return Err(Error::NodeOutOfRange { node: i.max(j), p });
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            dir.insert((i, j));
        }
        let mut undir = BTreeSet::new();
        for (i, j) in undirected {
            if i >= p || j >= p {
                return Err(Error::NodeOutOfRange { node: i.max(j), p });
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            undir.insert((i.min(j), i.max(j)));
        }
        for &(i, j) in &dir {
            if undir.contains(&(i.min(j), i.max(j))) {
                return Err(Error::MixedEdge(i, j));
            }
        }
        Ok(Pdag { p, directed: dir, undirected: undir })
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn directed(&self) -> &BTreeSet<Arrow> {
        &self.directed
    }

    pub fn undirected(&self) -> &BTreeSet<(usize, usize)> {
        &self.undirected
    }

    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.directed
            .iter()
            .map(|&(i, j)| (i.min(j), i.max(j)))
            .chain(self.undirected.iter().copied())
            .collect()
    }
}

fn summarize_class(p: usize, members: &[Dag]) -> Pdag {
    debug_assert!(!members.is_empty());
    let mut directed = Vec::new();
    let mut undirected = Vec::new();
    for (i, j) in members[0].arrows() {
        if members.iter().all(|m| m.has_arrow(i, j)) {
            directed.push((i, j));
        } else {
            undirected.push((i.min(j), i.max(j)));
        }
    }
    Pdag::new(p, directed, undirected).expect("class summary is well formed")
}

/// Essential graph (CPDAG) of the Markov equivalence class of `dag`,
/// computed by enumerating the class and intersecting orientations.
pub fn cpdag(dag: &Dag) -> Pdag {
    summarize_class(dag.p(), &enumerate_mec(dag))
}

/// Essential graph of the interventional Markov equivalence class: the
/// members are the Markov-equivalent DAGs whose intervened skeletons match
/// `dag`'s under every regime, and an arrow stays directed iff all members
/// orient it the same way. With an observational-only family this is
/// exactly [`cpdag`]; richer families orient more arrows.
pub fn i_essential_graph(dag: &Dag, family: &InterventionFamily) -> Result<Pdag> {
    family.validate_for(dag.p())?;
    let truth_skeletons: Vec<BTreeSet<(usize, usize)>> = family
        .targets()
        .iter()
        .map(|t| Ok(skeleton(&interventional_dag(dag, t)?)))
        .collect::<Result<_>>()?;
    let members: Vec<Dag> = enumerate_mec(dag)
        .into_iter()
        .filter(|m| {
            family.targets().iter().zip(&truth_skeletons).all(|(t, sk)| {
                skeleton(&interventional_dag(m, t).expect("targets validated")) == *sk
            })
        })
        .collect();
    Ok(summarize_class(dag.p(), &members))
}

/// Every labeled DAG on `p` nodes, by brute force over the 3^(p choose 2)
/// orientation assignments. Only sensible for small `p`; the test suite uses
/// it as ground truth.
pub fn all_dags(p: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..p)
        .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    let mut assignment = vec![0u8; pairs.len()];
    loop {
        let arrows: Vec<Arrow> = pairs
            .iter()
            .zip(&assignment)
            .filter_map(|(&(i, j), &a)| match a {
                1 => Some((i, j)),
                2 => Some((j, i)),
                _ => None,
            })
            .collect();
        if let Ok(dag) = Dag::new(p, arrows) {
            out.push(dag);
        }
        // Increment the base-3 counter.
        let mut k = 0;
        loop {
            if k == assignment.len() {
                return out;
            }
            assignment[k] += 1;
            if assignment[k] < 3 {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(nodes: &[usize]) -> NodeSet {
        nodes.iter().copied().collect()
    }

    fn chain3() -> Dag {
        Dag::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn collider3() -> Dag {
        // 0 -> 2 <- 1
        Dag::new(3, [(0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(Dag::new(2, [(0, 2)]), Err(Error::NodeOutOfRange { node: 2, p: 2 }));
        assert_eq!(Dag::new(2, [(1, 1)]), Err(Error::SelfLoop(1)));
        assert_eq!(Dag::new(2, [(0, 1), (1, 0)]), Err(Error::CyclicGraph));
        assert_eq!(Dag::new(3, [(0, 1), (1, 2), (2, 0)]), Err(Error::CyclicGraph));
    }

    #[test]
    fn d_separation_on_chain() {
        // Chain 0 -> 1 -> 2: ends dependent marginally, separated by the middle.
        let g = chain3();
        assert!(!d_separated(&g, &set(&[0]), &set(&[2]), &set(&[])).unwrap());
        assert!(d_separated(&g, &set(&[0]), &set(&[2]), &set(&[1])).unwrap());
    }

    #[test]
    fn d_separation_on_collider() {
        // Collider 0 -> 2 <- 1: spouses independent until the collider is observed.
        let g = collider3();
        assert!(d_separated(&g, &set(&[0]), &set(&[1]), &set(&[])).unwrap());
        assert!(!d_separated(&g, &set(&[0]), &set(&[1]), &set(&[2])).unwrap());
    }

    #[test]
    fn d_separation_through_collider_descendant() {
        // 0 -> 2 <- 1, 2 -> 3: conditioning on the descendant also opens the collider.
        let g = Dag::new(4, [(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(d_separated(&g, &set(&[0]), &set(&[1]), &set(&[])).unwrap());
        assert!(!d_separated(&g, &set(&[0]), &set(&[1]), &set(&[3])).unwrap());
        assert!(!d_separated_moral(&g, &set(&[0]), &set(&[1]), &set(&[3])).unwrap());
    }

    #[test]
    fn d_separation_validates_sets() {
        let g = chain3();
        assert_eq!(
            d_separated(&g, &set(&[0]), &set(&[0]), &set(&[])),
            Err(Error::OverlappingSets)
        );
        assert_eq!(
            d_separated(&g, &set(&[0]), &set(&[3]), &set(&[])),
            Err(Error::NodeOutOfRange { node: 3, p: 3 })
        );
        // Empty sides are vacuously separated.
        assert!(d_separated(&g, &set(&[]), &set(&[2]), &set(&[])).unwrap());
    }

    #[test]
    fn interventional_dag_severs_incoming() {
        let g = chain3();
        let cut = interventional_dag(&g, &set(&[1])).unwrap();
        assert_eq!(cut.arrows().collect::<Vec<_>>(), vec![(1, 2)]);
        let same = interventional_dag(&g, &set(&[])).unwrap();
        assert_eq!(same, g);
        assert!(interventional_dag(&g, &set(&[7])).is_err());
    }

    #[test]
    fn covered_arrows_examples() {
        assert_eq!(covered_arrows(&chain3()), set_of(&[(0, 1)]));
        assert_eq!(covered_arrows(&collider3()), BTreeSet::new());
        // Complete DAG 0 -> 1 -> 2, 0 -> 2: covered arrows are 0 -> 1 and 1 -> 2.
        let complete = Dag::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(covered_arrows(&complete), set_of(&[(0, 1), (1, 2)]));
    }

    fn set_of(arrows: &[Arrow]) -> BTreeSet<Arrow> {
        arrows.iter().copied().collect()
    }

    #[test]
    fn skeleton_and_immoralities() {
        assert_eq!(
            skeleton(&collider3()).into_iter().collect::<Vec<_>>(),
            vec![(0, 2), (1, 2)]
        );
        assert_eq!(
            immoralities(&collider3()).into_iter().collect::<Vec<_>>(),
            vec![(0, 2, 1)]
        );
        assert!(immoralities(&chain3()).is_empty());
        // Shielded collider: parents adjacent, so no immorality.
        let shielded = Dag::new(3, [(0, 2), (1, 2), (0, 1)]).unwrap();
        assert!(immoralities(&shielded).is_empty());
    }

    #[test]
    fn markov_equivalence_examples() {
        let fwd = chain3();
        let bwd = Dag::new(3, [(2, 1), (1, 0)]).unwrap();
        assert!(markov_equivalent(&fwd, &bwd).unwrap());
        assert!(!markov_equivalent(&fwd, &collider3()).unwrap());
        assert_eq!(
            markov_equivalent(&fwd, &Dag::empty(4)),
            Err(Error::SizeMismatch(3, 4))
        );
    }

    #[test]
    fn i_markov_equivalence_examples() {
        let g = Dag::new(2, [(0, 1)]).unwrap();
        let h = Dag::new(2, [(1, 0)]).unwrap();
        let obs = InterventionFamily::observational();
        assert!(i_markov_equivalent(&g, &h, &obs).unwrap());
        // Intervening on node 1 separates the two orientations.
        let fam = InterventionFamily::new(vec![set(&[]), set(&[1])]).unwrap();
        assert!(!i_markov_equivalent(&g, &h, &fam).unwrap());
    }

    #[test]
    fn family_validation() {
        assert_eq!(InterventionFamily::new(vec![]), Err(Error::EmptyFamily));
        assert_eq!(
            InterventionFamily::new(vec![set(&[0])]),
            Err(Error::ObservationalFirst)
        );
        let fam = InterventionFamily::new(vec![set(&[]), set(&[5])]).unwrap();
        assert!(fam.validate_for(6).is_ok());
        assert_eq!(
            fam.validate_for(5),
            Err(Error::NodeOutOfRange { node: 5, p: 5 })
        );
    }

    #[test]
    fn exclusive_regimes_examples() {
        let fam =
            InterventionFamily::new(vec![set(&[]), set(&[4]), set(&[5])]).unwrap();
        let (with_i, with_j) = fam.exclusive_regimes(4, 5);
        assert_eq!(with_i, set(&[1]));
        assert_eq!(with_j, set(&[2]));
        let (a, b) = fam.exclusive_regimes(0, 1);
        assert!(a.is_empty() && b.is_empty());
        assert_eq!(fam.regimes_not_targeting(4), set(&[0, 2]));
    }

    #[test]
    fn mec_enumeration_counts() {
        // The chain's class has the three fully-undirectable orientations.
        assert_eq!(enumerate_mec(&chain3()).len(), 3);
        // A collider is alone in its class.
        assert_eq!(enumerate_mec(&collider3()).len(), 1);
        // Complete DAG on 3 nodes: all 6 orderings.
        let complete = Dag::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(enumerate_mec(&complete).len(), 6);
    }

    #[test]
    fn cpdag_examples() {
        let chain_cp = cpdag(&chain3());
        assert!(chain_cp.directed().is_empty());
        assert_eq!(chain_cp.undirected(), &set_of(&[(0, 1), (1, 2)]));
        let coll_cp = cpdag(&collider3());
        assert_eq!(coll_cp.directed(), &set_of(&[(0, 2), (1, 2)]));
        assert!(coll_cp.undirected().is_empty());
        let single = cpdag(&Dag::new(2, [(0, 1)]).unwrap());
        assert!(single.directed().is_empty());
        assert_eq!(single.undirected(), &set_of(&[(0, 1)]));
    }

    #[test]
    fn i_essential_graph_examples() {
        let g = chain3();
        let obs = InterventionFamily::observational();
        assert_eq!(i_essential_graph(&g, &obs).unwrap(), cpdag(&g));
        // Intervening on the middle node pins down the whole chain.
        let fam = InterventionFamily::new(vec![set(&[]), set(&[1])]).unwrap();
        let ess = i_essential_graph(&g, &fam).unwrap();
        assert_eq!(ess.directed(), &set_of(&[(0, 1), (1, 2)]));
        assert!(ess.undirected().is_empty());
        let none = i_essential_graph(&Dag::empty(3), &fam).unwrap();
        assert!(none.directed().is_empty() && none.undirected().is_empty());
    }

    #[test]
    fn pdag_rejects_mixed_edges() {
        assert_eq!(
            Pdag::new(2, [(0, 1)], [(1, 0)]),
            Err(Error::MixedEdge(0, 1))
        );
    }

    #[test]
    fn all_dags_counts() {
        // Known counts of labeled DAGs.
        assert_eq!(all_dags(1).len(), 1);
        assert_eq!(all_dags(2).len(), 3);
        assert_eq!(all_dags(3).len(), 25);
        assert_eq!(all_dags(4).len(), 543);
    }

    #[test]
    fn descendants_and_order() {
        let g = Dag::new(4, [(0, 1), (1, 2), (0, 3)]).unwrap();
        assert_eq!(g.descendants(0), set(&[1, 2, 3]));
        assert_eq!(g.nondescendants(2), set(&[0, 1, 3]));
        assert_eq!(g.topological_order(), vec![0, 1, 2, 3]);
    }
}
