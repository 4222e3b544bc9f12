//! Path exploration strategies over compiled programs.
//!
//! Two strategies share all bookkeeping: a *pure* depth-first search that
//! decides every branch side the moment it is taken, and a *speculative*
//! one that takes branches unchecked until `depth` decisions accumulate,
//! then decides them in one batched solve — localizing any failure by
//! binary search over the conjunction's prefixes.

mod localize;
mod pure;
mod speculative;
#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

use crate::solver::{Solver, SolverException, SolverStats};
use crate::symcore::{compile, BranchSide, CompiledProgram, Constraint, Model};

pub use localize::{localize, probe_budget, Localization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Pure,
    Speculative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplorationOrder {
    FalseFirst,
    TrueFirst,
}

impl ExplorationOrder {
    /// The side explored first at a fork.
    pub fn first(self) -> BranchSide {
        match self {
            ExplorationOrder::FalseFirst => BranchSide::False,
            ExplorationOrder::TrueFirst => BranchSide::True,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub strategy: Strategy,
    /// Speculation depth: how many unconfirmed decisions may accumulate
    /// before a batched solve is forced. Depth 1 degenerates to checking
    /// every decision immediately.
    pub depth: u32,
    pub order: ExplorationOrder,
    /// Record localized infeasibilities and use them to skip the solver
    /// call for entailed sibling sides.
    pub optimize: bool,
    /// Confirm an error site is reachable before reporting it. Without
    /// this, an error site reached under unconfirmed speculation is
    /// reported as-is (possibly spuriously). Sites reached with nothing
    /// unconfirmed — always, for the pure strategy — are unaffected: their
    /// reachability is already established.
    pub recheck: bool,
    /// Iterations after which a loop's test silently ends the path.
    pub loop_bound: u64,
    /// Whether a side confirmed by entailment (an avoided solve) anchors
    /// later localizations and resets the speculation count, exactly as a
    /// solver-confirmed side would.
    pub absurdity_confirm_resets_depth: bool,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            strategy: Strategy::Speculative,
            depth: 3,
            order: ExplorationOrder::TrueFirst,
            optimize: true,
            recheck: true,
            loop_bound: 4,
            absurdity_confirm_resets_depth: true,
        }
    }
}

/// How a recorded leaf of the explored path tree ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndKind {
    /// The program ran to completion (or a loop bound) on this path.
    Normal,
    /// An error site fired and was reported on this path.
    Error,
    /// The path's condition was proven unsatisfiable and cut.
    PrunedInfeasible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafRecord {
    /// Branch sides from the root, e.g. "TFT".
    pub sides: String,
    pub end: EndKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    pub message: String,
    pub site: String,
    /// Sides of the erroring path (error side included when conditional).
    pub sides: String,
    /// The path condition at the report, in order.
    pub conjunction: Vec<String>,
    /// Input values reaching the error, when its feasibility was
    /// confirmed; `None` marks a possibly spurious, unconfirmed report.
    pub witness: Option<Model>,
}

/// One solver query, in issue order.
#[derive(Debug, Clone, Serialize)]
pub struct QueryRecord {
    /// Branch sides of the conjunction queried (deciding conjunct last).
    pub sides: String,
    pub conjunction: Vec<String>,
    pub sat: bool,
    /// What the query was for: `branch`, `boundary`, `path-end`,
    /// `err-check`, `probe`, or `scan`. Excluded from equivalence
    /// comparisons between strategies.
    pub purpose: &'static str,
}

/// One localization episode over a failed batched conjunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedSegment {
    /// Candidates searched: failed length minus the trusted base.
    pub m_eff: usize,
    pub probes: u64,
    pub first_bad: usize,
}

/// Everything observable about one exploration.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ExplorationRecord {
    pub leaves: Vec<LeafRecord>,
    pub bugs: Vec<BugReport>,
    pub queries: Vec<QueryRecord>,
    pub failed_segments: Vec<FailedSegment>,
    /// Sides whose solver call was skipped because a recorded
    /// infeasibility of the sibling entailed them.
    pub avoided_sides: Vec<String>,
    /// Solver exceptions survived by cutting the affected side.
    pub incidents: Vec<String>,
    pub stats: SolverStats,
    /// Instructions executed, including along later-discarded states.
    pub instructions: u64,
}

/// A solver exception that aborted a pure exploration (the speculative
/// strategy instead survives exceptions by cutting, recording incidents).
#[derive(Debug, thiserror::Error)]
#[error("solver failed on path `{sides}`: {error}")]
pub struct SolverFailure {
    pub sides: String,
    #[source]
    pub error: SolverException,
}

/// Explores every feasible path of `program` under `config`.
pub fn explore(
    program: &CompiledProgram,
    config: &SearchConfig,
    solver: &mut dyn Solver,
) -> Result<ExplorationRecord, SolverFailure> {
    assert!(config.depth >= 1, "speculation depth must be at least 1");
    match config.strategy {
        Strategy::Pure => pure::run(program, config, solver),
        Strategy::Speculative => Ok(speculative::run(program, config, solver)),
    }
}

/// Convenience: compile and explore source text in one call.
pub fn explore_source(
    source: &str,
    config: &SearchConfig,
    solver: &mut dyn Solver,
) -> Result<ExplorationRecord, ExploreError> {
    let program = crate::lang::load_program(source).map_err(ExploreError::Language)?;
    let compiled = compile(&program);
    explore(&compiled, config, solver).map_err(ExploreError::Solver)
}

#[derive(Debug, thiserror::Error)]
pub enum ExploreError {
    #[error(transparent)]
    Language(crate::lang::LangError),
    #[error(transparent)]
    Solver(SolverFailure),
}

pub(crate) fn render_conjunction(constraints: &[Constraint]) -> Vec<String> {
    constraints.iter().map(|c| c.to_string()).collect()
}
