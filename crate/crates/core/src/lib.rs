//! Exact maximum t-robust, t-hereditary and t-connected 2-clubs.
//!
//! A 2-club is a vertex set inducing a subgraph of diameter at most two.
//! The three models strengthen it in different ways, and all of them reduce
//! to a pairwise *compatibility* predicate: a set is a solution iff every
//! pair in it is compatible. [`solve`] finds a maximum solution exactly.
//!
//! ```
//! use twoclub_core::{families, solve, Limits, ModelSpec};
//!
//! let k33 = families::complete_bipartite(3, 3);
//! let report = solve(&k33, ModelSpec::connected(3), &Limits::none());
//! assert_eq!(report.best.unwrap().size, 6);
//! ```

pub mod clique;
pub mod compat;
pub mod flow;
pub mod generator;
pub mod graph;
pub mod ilp;
pub mod io;
pub mod model;
pub mod oracle;
pub mod reductions;
pub mod solver;

pub use clique::clique_max;
pub use compat::KernelState;
pub use graph::{families, Graph, GraphError, VertexSet};
pub use model::{Model, ModelSpec};
pub use solver::{solve, Limits, SolveReport, Solution};
