//! An abstract model of path exploration over labeled binary trees.
//!
//! The full engine explores programs whose branch feasibility is decided
//! by a constraint solver. For studying *how many* solver calls a search
//! strategy makes — as opposed to what the calls contain — the program is
//! irrelevant: all that matters is the shape of the path tree and which
//! branch sides are feasible. This module replaces the program with a
//! [`LabeledTree`] whose every side carries a feasibility bit, and
//! replaces the solver with a trivial probe (a prefix is satisfiable
//! exactly when every side on it is labeled feasible).
//!
//! On top of that abstraction it provides:
//!
//! - [`simulate_pure`] and [`simulate_sse`], which walk a tree with the
//!   same control flow as the real search strategies and count probes;
//! - [`eq1_formula`], the closed-form probe-count prediction for full
//!   trees, exercised against the simulator on a grid of heights and
//!   speculation depths;
//! - [`gen_random_tree`], a seeded generator of valid labeled trees for
//!   statistical comparisons between strategies;
//! - [`replay_fixture`], which re-runs five pinned scenarios over the
//!   checked-in fixture trees and diffs the probe traces against
//!   hard-coded expectations.

mod fixtures;
mod formula;
mod gen;
mod sim;
mod tree;

pub use fixtures::{replay_fixture, FixtureReplay, UnknownFixture, FIXTURE_NAMES};
pub use formula::eq1_formula;
pub use gen::gen_random_tree;
pub use sim::{simulate_pure, simulate_sse, SimResult};
pub use tree::{parse_tree, LabeledTree, SideCounts, SideSlot, TreeError};
