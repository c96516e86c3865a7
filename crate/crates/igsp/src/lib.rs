//! Causal structure discovery from mixed observational and interventional data.
//!
//! The library recovers directed acyclic graphs up to their interventional
//! Markov equivalence class by searching over permutations of the variables.
//! For each permutation it builds the sparsest DAG consistent with that
//! ordering (a minimal I-MAP) and walks between permutations by reversing
//! covered arrows. Two search drivers are provided:
//!
//! * [`search::igsp`]: greedy sparsest-permutation search driven by a
//!   conditional-independence oracle (exact d-separation or a Gaussian
//!   partial-correlation test on data).
//! * [`search::scored_search`]: penalized-likelihood search that accepts
//!   bounded score drops along the way (slack `delta`) and commits on strict
//!   improvement.
//!
//! Supporting modules: [`graph`] (DAGs, d-separation, equivalence classes),
//! [`imap`] (permutations and minimal I-MAPs), [`citest`] (independence
//! oracles), [`score`] (pooled Gaussian likelihood scores), [`sem`] (linear
//! structural equation simulation), [`eval`] (recovery metrics and
//! consistency sweeps), and [`cli`] (manifest/CSV interface used by the
//! binary).
//!
//! Everything is written for desk-scale verification: graph routines are
//! exact and deliberately favor enumeration over cleverness, so results can
//! be cross-checked against brute force in the test suite.

pub mod citest;
pub mod cli;
pub mod eval;
pub mod graph;
pub mod imap;
pub mod score;
pub mod search;
pub mod sem;

mod error;
pub(crate) mod rng;

pub use citest::{CiOracle, CiQuery, DataOracle, DsepOracle, RegimeData};
pub use error::{Error, Result};
pub use graph::{Arrow, Dag, InterventionFamily, NodeSet, Pdag};
pub use imap::Permutation;
pub use score::ScoreConfig;
pub use search::{Objective, SearchConfig, SearchResult, TraceEvent};
