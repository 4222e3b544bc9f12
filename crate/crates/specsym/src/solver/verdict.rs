//! The solver interface: verdicts, exceptions, and the `Solver` trait.

use std::time::Duration;

use thiserror::Error;

use crate::symcore::{Constraint, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatStatus {
    Sat,
    Unsat,
}

/// A decided conjunction: its status, a witness when satisfiable, and how
/// long the decision took.
#[derive(Debug, Clone)]
pub struct SolverVerdict {
    pub status: SatStatus,
    pub model: Option<Model>,
    pub elapsed: Duration,
}

impl SolverVerdict {
    pub fn is_sat(&self) -> bool {
        self.status == SatStatus::Sat
    }
}

/// A failure to decide. Exceptions are distinct from `unsat`: an undecided
/// conjunction must never be treated as infeasible.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolverException {
    /// A resource cap (nodes, cases) was exhausted before a decision.
    #[error("solver capacity exceeded: {0}")]
    Capacity(String),
    #[error("solver timed out after {0:?}")]
    Timeout(Duration),
    /// The external solver replied with something unparseable or with a
    /// model that fails substitution.
    #[error("malformed solver response: {0}")]
    Protocol(String),
    #[error("solver i/o failure: {0}")]
    Io(String),
}

/// A decision procedure for conjunctions of linear integer constraints.
pub trait Solver {
    fn solve(&mut self, constraints: &[Constraint]) -> Result<SolverVerdict, SolverException>;
    fn name(&self) -> &'static str;
}
