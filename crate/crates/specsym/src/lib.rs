//! Speculative symbolic execution for a small imperative integer language.
//!
//! The crate is organised as a pipeline:
//!
//! - [`lang`] parses and validates `.sx` programs,
//! - [`symcore`] steps a program symbolically, producing branch decisions
//!   and linear path constraints,
//! - [`solver`] decides constraint conjunctions over bounded integers,
//! - [`search`] explores the whole path space, either plain depth-first or
//!   speculatively with batched solver calls, binary-search backtracking and
//!   reuse of branch sides already proven infeasible,
//! - [`treesim`] runs the same two strategies over abstract labelled
//!   branch trees to study solver-call counts in isolation.

pub mod lang;
pub mod search;
pub mod solver;
pub mod symcore;
pub mod treesim;
