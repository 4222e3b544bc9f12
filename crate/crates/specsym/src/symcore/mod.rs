//! Symbolic execution core: linear forms, constraints, path conditions,
//! and the single-step state transition function.
//!
//! The types here are deliberately value-semantic: [`step`] never mutates
//! its input state, so a search strategy can fork, stash, and revisit
//! states freely and a run is replayable from its decisions alone.

mod constraint;
mod linexpr;
mod pc;
mod state;

pub use constraint::{Constraint, Normalized};
pub use linexpr::LinExpr;
pub use pc::{BranchSide, Feasibility, Model, PathCondition, PcEntry, ProvenanceError};
pub use state::{
    compile, eval, eval_cond, eval_linear, step, BranchKind, BranchOutcome, CompiledProgram,
    ErrorSite, Op, StepResult, SymExpr, SymState,
};
