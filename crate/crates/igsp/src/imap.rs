//! Permutations and minimal I-MAPs: the sparsest DAG consistent with a
//! variable ordering according to a conditional-independence oracle.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;

use crate::citest::CiOracle;
use crate::error::{Error, Result};
use crate::graph::{covered_arrows, Dag, NodeSet};

/// A total order on nodes `0..p`, stored both ways (order and positions).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl Permutation {
    /// Validates that `order` is a bijection on `0..order.len()`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let p = order.len();
        let mut position = vec![usize::MAX; p];
        for (pos, &v) in order.iter().enumerate() {
            if v >= p || position[v] != usize::MAX {
                return Err(Error::NotAPermutation(p));
            }
            position[v] = pos;
        }
        Ok(Permutation { order, position })
    }

    pub fn identity(p: usize) -> Self {
        Permutation { order: (0..p).collect(), position: (0..p).collect() }
    }

    /// Uniformly random order via Fisher-Yates.
    pub fn random<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..p).collect();
        for i in (1..p).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        Permutation::new(order).expect("shuffle of identity is a permutation")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.order.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    #[inline]
    pub fn node_at(&self, pos: usize) -> usize {
        self.order[pos]
    }

    pub fn position_of(&self, node: usize) -> Result<usize> {
        if node >= self.order.len() {
            return Err(Error::NodeOutOfRange { node, p: self.order.len() });
        }
        Ok(self.position[node])
    }

    /// The order with nodes `u` and `v` exchanged in place.
    pub fn transposed(&self, u: usize, v: usize) -> Result<Self> {
        let pu = self.position_of(u)?;
        let pv = self.position_of(v)?;
        let mut order = self.order.clone();
        order.swap(pu, pv);
        Permutation::new(order)
    }
}

/// The conditioning set the minimal I-MAP construction uses for the pair
/// `(i, j)`: every node ordered no later than the later of the two, minus
/// the pair itself.
pub fn conditioning_set(perm: &Permutation, i: usize, j: usize) -> Result<NodeSet> {
    if i == j {
        return Err(Error::InvalidQuery(format!("i and j must differ, got {i}")));
    }
    let pi = perm.position_of(i)?;
    let pj = perm.position_of(j)?;
    let cut = pi.max(pj);
    Ok(perm.order()[..=cut]
        .iter()
        .copied()
        .filter(|&v| v != i && v != j)
        .collect())
}

/// Builds the minimal I-MAP of the oracle's distribution in `regime` along
/// `perm`: for positions `a < b`, the arrow `perm[a] -> perm[b]` is present
/// iff the oracle reports dependence given [`conditioning_set`]. Queries are
/// issued in position order (earlier endpoint ascending, then the later).
pub fn minimal_imap(perm: &Permutation, oracle: &dyn CiOracle, regime: usize) -> Result<Dag> {
    let p = perm.len();
    let mut arrows = Vec::new();
    for a in 0..p {
        for b in a + 1..p {
            let i = perm.node_at(a);
            let j = perm.node_at(b);
            let s = conditioning_set(perm, i, j)?;
            if !oracle.query(i, j, &s, regime)? {
                arrows.push((i, j));
            }
        }
    }
    Ok(Dag::new(p, arrows).expect("order-consistent arrows are acyclic"))
}

/// A deterministic topological order: Kahn's algorithm, always emitting the
/// smallest ready node first.
pub fn linear_extension(dag: &Dag) -> Permutation {
    let mut indegree: Vec<usize> = (0..dag.p()).map(|v| dag.parents(v).len()).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = (0..dag.p())
        .filter(|&v| indegree[v] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(dag.p());
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &c in dag.children(v) {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    Permutation::new(order).expect("DAG yields a permutation")
}

/// Reverses the covered arrow `(i, j)`. Covered reversals cannot create
/// cycles, so the result is again a DAG; a missing or non-covered arrow is
/// an invalid move.
pub fn reverse_covered(dag: &Dag, arrow: (usize, usize)) -> Result<Dag> {
    let (i, j) = arrow;
    if !dag.has_arrow(i, j) {
        return Err(Error::MissingArrow(i, j));
    }
    if !covered_arrows(dag).contains(&arrow) {
        return Err(Error::NotCovered(i, j));
    }
    dag.with_arrow_reversed(i, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::citest::DsepOracle;
    use crate::graph::InterventionFamily;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(nodes: &[usize]) -> NodeSet {
        nodes.iter().copied().collect()
    }

    fn perm(order: &[usize]) -> Permutation {
        Permutation::new(order.to_vec()).unwrap()
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 2, 1]).is_ok());
        assert_eq!(Permutation::new(vec![0, 0, 1]), Err(Error::NotAPermutation(3)));
        assert_eq!(Permutation::new(vec![0, 3]), Err(Error::NotAPermutation(2)));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = Permutation::random(6, &mut rng);
        assert_eq!(q.len(), 6);
        for v in 0..6 {
            assert_eq!(q.node_at(q.position_of(v).unwrap()), v);
        }
    }

    #[test]
    fn conditioning_set_examples() {
        // Order (2, 1, 0): the pair at the front conditions on nothing.
        let p = perm(&[2, 1, 0]);
        assert_eq!(conditioning_set(&p, 2, 1).unwrap(), set(&[]));
        assert_eq!(conditioning_set(&p, 1, 0).unwrap(), set(&[2]));
        // Identity order on 4 nodes, endpoints of the whole range.
        let id = Permutation::identity(4);
        assert_eq!(conditioning_set(&id, 0, 3).unwrap(), set(&[1, 2]));
        assert!(conditioning_set(&id, 2, 2).is_err());
    }

    #[test]
    fn minimal_imap_along_true_order_recovers_truth() {
        let chain = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let oracle = DsepOracle::new(&chain, &InterventionFamily::observational()).unwrap();
        let g = minimal_imap(&Permutation::identity(3), &oracle, 0).unwrap();
        assert_eq!(g, chain);
    }

    #[test]
    fn minimal_imap_against_the_order_densifies() {
        // Chain 0 -> 1 -> 2 read backwards is still a chain.
        let chain = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let oracle = DsepOracle::new(&chain, &InterventionFamily::observational()).unwrap();
        let g = minimal_imap(&perm(&[2, 1, 0]), &oracle, 0).unwrap();
        assert_eq!(g, Dag::new(3, [(2, 1), (1, 0)]).unwrap());

        // A collider 0 -> 2 <- 1 read as (2, 0, 1) forces the complete graph.
        let coll = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        let oracle = DsepOracle::new(&coll, &InterventionFamily::observational()).unwrap();
        let g = minimal_imap(&perm(&[2, 0, 1]), &oracle, 0).unwrap();
        assert_eq!(g, Dag::new(3, [(2, 0), (2, 1), (0, 1)]).unwrap());
    }

    #[test]
    fn linear_extension_prefers_small_labels() {
        assert_eq!(linear_extension(&Dag::empty(3)).order(), &[0, 1, 2]);
        let g = Dag::new(3, [(1, 0)]).unwrap();
        assert_eq!(linear_extension(&g).order(), &[1, 0, 2]);
        let h = Dag::new(4, [(3, 1), (1, 0)]).unwrap();
        assert_eq!(linear_extension(&h).order(), &[2, 3, 1, 0]);
    }

    #[test]
    fn reverse_covered_moves() {
        let chain = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let rev = reverse_covered(&chain, (0, 1)).unwrap();
        assert_eq!(rev, Dag::new(3, [(1, 0), (1, 2)]).unwrap());
        // Reversing back is an involution.
        assert_eq!(reverse_covered(&rev, (1, 0)).unwrap(), chain);
        // 1 -> 2 is not covered in the chain: pa(2) = {1} but pa(1) = {0}.
        assert_eq!(reverse_covered(&chain, (1, 2)), Err(Error::NotCovered(1, 2)));
        assert_eq!(reverse_covered(&chain, (0, 2)), Err(Error::MissingArrow(0, 2)));
    }
}
