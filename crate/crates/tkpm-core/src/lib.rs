//! Solvers for Top-k Perfect Matching (TkPM) and Exact Matching (EM) on
//! blown-up graphs.
//!
//! TkPM asks for a perfect matching maximizing the total weight of its `k`
//! heaviest edges; EM asks for a perfect matching with exactly `k` red
//! edges. Both are tractable here because the inputs are blowups: graphs
//! obtained from a small prototype by replacing vertices with cliques or
//! independent sets ("blobs") and edges with complete bipartite edge sets
//! ("bands").
//!
//! The crate provides:
//! - [`nd`]: an exact solver and a `(1 - eps)` approximation scheme
//!   parameterized by the neighborhood diversity of the input,
//! - [`recursive`]: a divide-and-conquer solver for blowups of
//!   bounded-bandwidth prototypes, plus its exact-matching adaptation,
//! - [`matching`]: the blossom-based maximum-weight perfect matching kernel
//!   everything rests on,
//! - [`oracle`]: brute-force and randomized reference solvers used for
//!   cross-checking at small scale,
//! - [`gen`]: seeded instance generators.

pub mod blossom;
pub mod blowup;
pub mod error;
pub mod gen;
pub mod graph;
pub mod matching;
pub mod nd;
pub mod oracle;
pub mod recursive;

pub use error::{Error, Result};
pub use graph::{Color, Edge, Matching, SubgraphMap, WeightedColoredGraph};
