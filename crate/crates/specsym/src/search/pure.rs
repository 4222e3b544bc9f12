//! The pure strategy: depth-first exploration that decides every branch
//! side with its own solver query at the moment it is taken, so every
//! live state's path condition is always confirmed satisfiable.

use crate::solver::{counted_solve, SideMeta, Solver};
use crate::symcore::{step, CompiledProgram, ErrorSite, Model, StepResult, SymState};

use super::{
    render_conjunction, BugReport, EndKind, ExplorationRecord, LeafRecord, QueryRecord,
    SearchConfig, SolverFailure,
};

pub(super) fn run(
    program: &CompiledProgram,
    config: &SearchConfig,
    solver: &mut dyn Solver,
) -> Result<ExplorationRecord, SolverFailure> {
    let mut run = PureRun { program, config, solver, rec: ExplorationRecord::default() };
    run.dfs(SymState::initial(program))?;
    Ok(run.rec)
}

struct PureRun<'a> {
    program: &'a CompiledProgram,
    config: &'a SearchConfig,
    solver: &'a mut dyn Solver,
    rec: ExplorationRecord,
}

impl PureRun<'_> {
    /// Decides `state`'s path condition now, caching the verdict on it.
    /// Exceptions abort the whole exploration: with nothing speculative to
    /// cut, there is no sound way to continue past an undecided side.
    fn decide(&mut self, state: &mut SymState, purpose: &'static str) -> Result<bool, SolverFailure> {
        let cs = state.pc.constraints();
        let meta = state
            .pc
            .entries()
            .last()
            .map(|e| SideMeta::for_constraint(&e.constraint, e.side));
        match counted_solve(self.solver, &mut self.rec.stats, &cs, meta) {
            Ok(v) => {
                let sat = v.is_sat();
                self.rec.queries.push(QueryRecord {
                    sides: state.pc.side_string(),
                    conjunction: render_conjunction(&cs),
                    sat,
                    purpose,
                });
                if sat {
                    state.pc.set_sat(v.model);
                } else {
                    state.pc.set_unsat();
                }
                Ok(sat)
            }
            Err(error) => Err(SolverFailure { sides: state.pc.side_string(), error }),
        }
    }

    /// Marks `state` feasible without a query: its newest conjunct is
    /// entailed by the (confirmed) prefix because the sibling side was
    /// just proven infeasible.
    fn mark_entailed(&mut self, state: &mut SymState, witness: Option<Model>) {
        self.rec.stats.avoided += 1;
        self.rec.avoided_sides.push(state.pc.side_string());
        state.pc.set_sat(witness);
    }

    fn leaf(&mut self, sides: String, end: EndKind) {
        self.rec.leaves.push(LeafRecord { sides, end });
    }

    fn report(&mut self, message: &str, site: &str, state: &SymState, witness: Option<Model>) {
        self.rec.bugs.push(BugReport {
            message: message.to_string(),
            site: site.to_string(),
            sides: state.pc.side_string(),
            conjunction: render_conjunction(&state.pc.constraints()),
            witness,
        });
        self.leaf(state.pc.side_string(), EndKind::Error);
    }

    /// Explores everything reachable from `cur`, whose path condition is
    /// already confirmed satisfiable.
    fn dfs(&mut self, mut cur: SymState) -> Result<(), SolverFailure> {
        loop {
            self.rec.instructions += 1;
            match step(&cur, self.program, self.config.loop_bound) {
                StepResult::Next(s) => cur = s,
                StepResult::PathEnd(s) => {
                    self.leaf(s.pc.side_string(), EndKind::Normal);
                    return Ok(());
                }
                StepResult::Branch(out) => {
                    let (mut first, mut second) = match self.config.order.first() {
                        crate::symcore::BranchSide::False => (out.false_state, out.true_state),
                        crate::symcore::BranchSide::True => (out.true_state, out.false_state),
                    };
                    let first_sat = self.decide(&mut first, "branch")?;
                    if first_sat {
                        self.dfs(first)?;
                    } else {
                        self.leaf(first.pc.side_string(), EndKind::PrunedInfeasible);
                    }
                    if !first_sat && self.config.optimize {
                        // The prefix is satisfiable and one side of the
                        // fork is not, so the other side is entailed.
                        let w = cur.pc.witness().cloned();
                        self.mark_entailed(&mut second, w);
                        self.dfs(second)?;
                    } else if self.decide(&mut second, "branch")? {
                        self.dfs(second)?;
                    } else {
                        self.leaf(second.pc.side_string(), EndKind::PrunedInfeasible);
                    }
                    return Ok(());
                }
                StepResult::ErrorSite(es) => match self.error_site(&cur, es)? {
                    Some(cont) => cur = cont,
                    None => return Ok(()),
                },
            }
        }
    }

    /// Handles an error site; returns the continuation state if the path
    /// goes on past the site.
    fn error_site(
        &mut self,
        cur: &SymState,
        es: ErrorSite,
    ) -> Result<Option<SymState>, SolverFailure> {
        let ErrorSite { message, site, err_constraint, mut err_state, cont_state } = es;
        let Some(_errc) = err_constraint else {
            // The error fires unconditionally on this (feasible) path.
            let witness = err_state.pc.witness().cloned();
            self.report(&message, &site, &err_state, witness);
            return Ok(None);
        };
        // The recheck flag is irrelevant here: a pure search never reaches
        // a site speculatively, so there is nothing to recheck — the error
        // side is decided like any other.
        let mut cont = cont_state.expect("conditional error sites have a continuation");
        if self.decide(&mut err_state, "err-check")? {
            let witness = err_state.pc.witness().cloned();
            self.report(&message, &site, &err_state, witness);
        } else {
            self.leaf(err_state.pc.side_string(), EndKind::PrunedInfeasible);
            if self.config.optimize {
                let w = cur.pc.witness().cloned();
                self.mark_entailed(&mut cont, w);
                return Ok(Some(cont));
            }
        }
        if self.decide(&mut cont, "branch")? {
            Ok(Some(cont))
        } else {
            self.leaf(cont.pc.side_string(), EndKind::PrunedInfeasible);
            Ok(None)
        }
    }
}
