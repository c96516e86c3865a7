use thiserror::Error;

/// Crate-wide error type. Variants are grouped by the layer that raises them;
/// everything is cheap to construct and carries enough context to be actionable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // Graphs and families.
    #[error("node {node} out of range for a graph on {p} nodes")]
    NodeOutOfRange { node: usize, p: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("arrow set contains a directed cycle")]
    CyclicGraph,
    #[error("node sets must be pairwise disjoint")]
    OverlappingSets,
    #[error("directed and undirected edges overlap on pair ({0}, {1})")]
    MixedEdge(usize, usize),
    #[error("graphs disagree on node count: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("intervention family must start with the observational regime (empty target set)")]
    ObservationalFirst,
    #[error("intervention family must contain at least one regime")]
    EmptyFamily,
    #[error("regime {regime} out of range: family has {regimes} regimes")]
    RegimeOutOfRange { regime: usize, regimes: usize },

    // Permutations.
    #[error("sequence is not a permutation of 0..{0}")]
    NotAPermutation(usize),

    // Independence queries and data.
    #[error("invalid independence query: {0}")]
    InvalidQuery(String),
    #[error("not enough samples: need at least {needed}, have {available}")]
    InsufficientSamples { needed: usize, available: usize },
    #[error("numerically degenerate computation on variables {vars:?}")]
    Degenerate { vars: Vec<usize> },
    #[error("data matrices disagree on column count: {0} vs {1}")]
    ColumnMismatch(usize, usize),
    #[error("regime data for {have} regimes, but {want} regimes are declared")]
    RegimeCountMismatch { have: usize, want: usize },

    // Search moves.
    #[error("arrow ({0}, {1}) is absent from the graph")]
    MissingArrow(usize, usize),
    #[error("arrow ({0}, {1}) is not covered")]
    NotCovered(usize, usize),

    // Configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
