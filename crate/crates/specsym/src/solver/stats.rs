//! Query accounting shared by every search strategy.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::symcore::{BranchSide, Constraint};

use super::verdict::{SatStatus, Solver, SolverException, SolverVerdict};

/// Outcome × branch side × relation kind of the *deciding conjunct* (the
/// most recently appended one) for each solved query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideTallies {
    pub feasible_true_equations: u64,
    pub feasible_true_inequations: u64,
    pub feasible_false_equations: u64,
    pub feasible_false_inequations: u64,
    pub infeasible_true_equations: u64,
    pub infeasible_true_inequations: u64,
    pub infeasible_false_equations: u64,
    pub infeasible_false_inequations: u64,
}

/// Aggregate solver counters for one exploration.
///
/// `total` counts *decided* queries only (`total = sat + unsat`);
/// exceptions are tracked separately and never masquerade as verdicts.
/// `avoided` counts solver calls skipped outright thanks to recorded
/// infeasibilities, so it contributes to no other counter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStats {
    pub total: u64,
    pub sat: u64,
    pub unsat: u64,
    pub avoided: u64,
    pub exceptions: u64,
    #[serde(skip)]
    pub solving_time: Duration,
    pub tallies: SideTallies,
}

/// Which branch side produced the deciding conjunct, and whether that
/// conjunct is an equation. `None` for queries with no deciding conjunct
/// (e.g. the empty conjunction).
#[derive(Debug, Clone, Copy)]
pub struct SideMeta {
    pub side: BranchSide,
    pub equation: bool,
}

impl SideMeta {
    /// Metadata for a conjunction decided by `constraint` taken on `side`.
    pub fn for_constraint(constraint: &Constraint, side: BranchSide) -> SideMeta {
        SideMeta { side, equation: constraint.is_equation() }
    }
}

impl SolverStats {
    pub fn record(&mut self, verdict: &SolverVerdict, meta: Option<SideMeta>) {
        self.total += 1;
        self.solving_time += verdict.elapsed;
        let feasible = verdict.status == SatStatus::Sat;
        if feasible {
            self.sat += 1;
        } else {
            self.unsat += 1;
        }
        let Some(meta) = meta else { return };
        let t = &mut self.tallies;
        let slot = match (feasible, meta.side, meta.equation) {
            (true, BranchSide::True, true) => &mut t.feasible_true_equations,
            (true, BranchSide::True, false) => &mut t.feasible_true_inequations,
            (true, BranchSide::False, true) => &mut t.feasible_false_equations,
            (true, BranchSide::False, false) => &mut t.feasible_false_inequations,
            (false, BranchSide::True, true) => &mut t.infeasible_true_equations,
            (false, BranchSide::True, false) => &mut t.infeasible_true_inequations,
            (false, BranchSide::False, true) => &mut t.infeasible_false_equations,
            (false, BranchSide::False, false) => &mut t.infeasible_false_inequations,
        };
        *slot += 1;
    }
}

/// Solves and records in one step, so no call path can forget the
/// accounting.
pub fn counted_solve(
    solver: &mut dyn Solver,
    stats: &mut SolverStats,
    constraints: &[Constraint],
    meta: Option<SideMeta>,
) -> Result<SolverVerdict, SolverException> {
    match solver.solve(constraints) {
        Ok(verdict) => {
            stats.record(&verdict, meta);
            Ok(verdict)
        }
        Err(e) => {
            stats.exceptions += 1;
            Err(e)
        }
    }
}
