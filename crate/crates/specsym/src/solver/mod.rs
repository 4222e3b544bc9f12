//! Constraint solving: the `Solver` trait, the built-in branch-and-prune
//! procedure, an external SMT-LIB client, an enumeration oracle, and the
//! query accounting layer.

mod builtin;
mod enumerate;
mod external;
mod smtlib;
mod stats;
mod verdict;

pub use builtin::BuiltinSolver;
pub use enumerate::{conjunction_symbols, enumerate_solve, satisfies};
pub use external::ExternalSolver;
pub use smtlib::{emit_query, parse_response};
pub use stats::{counted_solve, SideMeta, SideTallies, SolverStats};
pub use verdict::{SatStatus, Solver, SolverException, SolverVerdict};
