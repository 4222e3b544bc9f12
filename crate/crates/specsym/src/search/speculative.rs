//! The speculative strategy: take branches unchecked, batch the pending
//! decisions, and solve them together.
//!
//! A *slot* is pushed per decision. Slots start unconfirmed; whenever the
//! number of unconfirmed slots reaches the configured depth after a new
//! decision, the whole conjunction is solved once (a *boundary* solve). A
//! path that ends with unconfirmed slots gets one *path-end* solve.
//! Confirmation applies to every prefix at once, since a model of the full
//! conjunction witnesses them all.
//!
//! When a batched solve comes back unsatisfiable, the first bad prefix is
//! localized by binary search over prefix lengths (`localize`), the proven
//! prefix is confirmed, the offending side is pruned, and — with the
//! optimization on — recorded in a ledger so the sibling side, which the
//! prefix now entails, is confirmed without a solver call.
//!
//! Solver exceptions never abort the exploration: the affected side is cut
//! after a forward scan salvages whatever the episode's cached verdicts
//! can still confirm, and the incident is recorded.

use std::collections::BTreeMap;

use crate::solver::{counted_solve, SideMeta, Solver};
use crate::symcore::{
    step, BranchSide, CompiledProgram, Constraint, ErrorSite, Model, StepResult, SymState,
};

use super::localize::localize;
use super::{
    render_conjunction, BugReport, EndKind, ExplorationRecord, FailedSegment, LeafRecord,
    QueryRecord, SearchConfig,
};

/// One decision on the current path: the side being explored, and the
/// sibling side not yet explored (already consumed for continuations of
/// error sites, whose other side is resolved at the site itself).
struct Slot {
    taken: SymState,
    pending: Option<SymState>,
    confirmed: bool,
    /// A model of the conjunction through this slot, once confirmed.
    witness: Option<Model>,
}

impl Slot {
    fn unconfirmed(taken: &SymState, pending: Option<SymState>) -> Slot {
        Slot { taken: taken.clone(), pending, confirmed: false, witness: None }
    }
}

/// A conjunct with the side that introduced it; episodes index prefixes of
/// such sequences by length.
type Entries = Vec<(Constraint, BranchSide)>;

fn pc_entries(state: &SymState) -> Entries {
    state.pc.entries().iter().map(|e| (e.constraint.clone(), e.side)).collect()
}

fn side_string(entries: &[(Constraint, BranchSide)], len: usize) -> String {
    entries[..len].iter().map(|(_, s)| s.letter()).collect()
}

/// A verdict remembered during one failure episode, so nothing attempted
/// once is ever solved again within it.
#[derive(Clone)]
enum Probed {
    Sat(Option<Model>),
    Unsat,
    Raised,
}

/// How a failure episode resolved.
enum Outcome {
    /// Prefix of `pos - 1` proven satisfiable (witnessed), prefix of `pos`
    /// unsatisfiable.
    FirstBad { pos: usize, witness: Option<Model> },
    /// Prefix of `pos - 1` proven satisfiable, prefix of `pos` undecidable
    /// (solver exception): the side at `pos` must be abandoned unproven.
    CutAt { pos: usize, witness: Option<Model> },
}

pub(super) fn run(
    program: &CompiledProgram,
    config: &SearchConfig,
    solver: &mut dyn Solver,
) -> ExplorationRecord {
    let mut sse = Sse {
        program,
        config,
        solver,
        stack: Vec::new(),
        ledger: BTreeMap::new(),
        rec: ExplorationRecord::default(),
    };
    let mut cur = Some(SymState::initial(program));
    while let Some(state) = cur {
        cur = match sse.advance(state) {
            Some(next) => Some(next),
            None => sse.backtrack(),
        };
    }
    sse.rec
}

struct Sse<'a> {
    program: &'a CompiledProgram,
    config: &'a SearchConfig,
    solver: &'a mut dyn Solver,
    stack: Vec<Slot>,
    /// Sides proven infeasible, keyed by decision position (= prefix
    /// length). Scoped to the current stack: entries above a flipped
    /// position are dropped, because they were proven under a prefix that
    /// no longer exists.
    ledger: BTreeMap<usize, BranchSide>,
    rec: ExplorationRecord,
}

impl Sse<'_> {
    fn unconfirmed(&self) -> usize {
        self.stack.iter().filter(|s| !s.confirmed).count()
    }

    /// A model witnessing the conjunction of the first `pos` decisions
    /// (all of which must be confirmed). The empty prefix is witnessed by
    /// the empty model.
    fn prefix_witness(&self, pos: usize) -> Option<Model> {
        if pos == 0 {
            return Some(Model::new());
        }
        let slot = &self.stack[pos - 1];
        debug_assert!(slot.confirmed);
        slot.witness.clone()
    }

    fn confirm_prefix(&mut self, upto_pos: usize, witness: &Option<Model>) {
        for slot in &mut self.stack[..upto_pos] {
            if !slot.confirmed {
                slot.confirmed = true;
                slot.witness = witness.clone();
            }
        }
    }

    fn confirm_all(&mut self, witness: &Option<Model>) {
        self.confirm_prefix(self.stack.len(), witness);
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

    /// Issues one counted solver query for the prefix of `len` entries.
    fn decide(
        &mut self,
        entries: &Entries,
        len: usize,
        purpose: &'static str,
    ) -> Result<crate::solver::SolverVerdict, crate::solver::SolverException> {
        let cs: Vec<Constraint> = entries[..len].iter().map(|(c, _)| c.clone()).collect();
        let meta = entries[..len].last().map(|(c, s)| SideMeta::for_constraint(c, *s));
        let result = counted_solve(self.solver, &mut self.rec.stats, &cs, meta);
        if let Ok(v) = &result {
            self.rec.queries.push(QueryRecord {
                sides: side_string(entries, len),
                conjunction: render_conjunction(&cs),
                sat: v.is_sat(),
                purpose,
            });
        }
        result
    }

    /// Executes one instruction of the current path. `Some` continues from
    /// the returned state; `None` means the path is finished (or was cut)
    /// and the caller should backtrack.
    fn advance(&mut self, state: SymState) -> Option<SymState> {
        self.rec.instructions += 1;
        match step(&state, self.program, self.config.loop_bound) {
            StepResult::Next(s) => Some(s),
            StepResult::PathEnd(s) => {
                if self.unconfirmed() == 0 {
                    self.leaf(s.pc.side_string(), EndKind::Normal);
                    return None;
                }
                let entries = pc_entries(&s);
                match self.decide(&entries, entries.len(), "path-end") {
                    Ok(v) if v.is_sat() => {
                        self.confirm_all(&v.model);
                        self.leaf(s.pc.side_string(), EndKind::Normal);
                    }
                    Ok(_) => self.fail(&entries, entries.len()),
                    Err(e) => self.cut_after_exception(&entries, entries.len(), e),
                }
                None
            }
            StepResult::Branch(out) => {
                let (first, second) = match self.config.order.first() {
                    BranchSide::False => (out.false_state, out.true_state),
                    BranchSide::True => (out.true_state, out.false_state),
                };
                self.stack.push(Slot::unconfirmed(&first, Some(second)));
                self.speculative_append(first)
            }
            StepResult::ErrorSite(es) => self.error_site(&state, es),
        }
    }

    /// Applies the boundary rule after a new unconfirmed decision: once
    /// `depth` unconfirmed slots accumulate, solve the whole conjunction.
    fn speculative_append(&mut self, mut state: SymState) -> Option<SymState> {
        state.speculation_depth = self.unconfirmed() as u32;
        if self.unconfirmed() < self.config.depth as usize {
            return Some(state);
        }
        let entries = pc_entries(&state);
        match self.decide(&entries, entries.len(), "boundary") {
            Ok(v) if v.is_sat() => {
                self.confirm_all(&v.model);
                state.pc.set_sat(v.model);
                state.speculation_depth = 0;
                Some(state)
            }
            Ok(_) => {
                self.fail(&entries, entries.len());
                None
            }
            Err(e) => {
                self.cut_after_exception(&entries, entries.len(), e);
                None
            }
        }
    }

    /// Backtracks to the next unexplored side: pops exhausted slots and
    /// flips the first pending sibling found. Flipping consults the
    /// ledger: a sibling whose counterpart is recorded infeasible is
    /// entailed by the prefix, so its solve is skipped.
    fn backtrack(&mut self) -> Option<SymState> {
        loop {
            let pos = self.stack.len();
            let top = self.stack.last_mut()?;
            let Some(mut sibling) = top.pending.take() else {
                self.stack.pop();
                continue;
            };
            // Everything recorded above this position was relative to a
            // prefix that just changed.
            self.ledger.retain(|&p, _| p <= pos);
            let sibling_side = sibling
                .pc
                .entries()
                .last()
                .expect("a decision slot always carries a constraint")
                .side;
            if self.config.optimize && self.ledger.get(&pos) == Some(&sibling_side.opposite()) {
                self.rec.stats.avoided += 1;
                self.rec.avoided_sides.push(sibling.pc.side_string());
                let witness = self.prefix_witness(pos - 1);
                let top = self.stack.last_mut().expect("slot still present");
                if self.config.absurdity_confirm_resets_depth {
                    sibling.pc.set_sat(witness.clone());
                    top.confirmed = true;
                    top.witness = witness;
                } else {
                    top.confirmed = false;
                    top.witness = None;
                }
                top.taken = sibling.clone();
                sibling.speculation_depth = self.unconfirmed() as u32;
                return Some(sibling);
            }
            let top = self.stack.last_mut().expect("slot still present");
            top.taken = sibling.clone();
            top.confirmed = false;
            top.witness = None;
            match self.speculative_append(sibling) {
                Some(state) => return Some(state),
                None => continue,
            }
        }
    }

    /// Handles a batched conjunction that solved unsatisfiable: localizes
    /// the first bad prefix, confirms what the probes proved, prunes the
    /// offending side, and records it in the ledger.
    fn fail(&mut self, entries: &Entries, failed_len: usize) {
        let mut cache: BTreeMap<usize, Probed> = BTreeMap::new();
        cache.insert(failed_len, Probed::Unsat);
        match self.run_episode(entries, failed_len, cache, true) {
            Outcome::FirstBad { pos, witness } => self.finalize_prune(entries, pos, witness),
            Outcome::CutAt { pos, witness } => self.finalize_cut(entries, pos, witness),
        }
    }

    /// Handles a batched solve that raised instead of deciding: scans
    /// forward to salvage decidable prefixes, then cuts.
    fn cut_after_exception(
        &mut self,
        entries: &Entries,
        failed_len: usize,
        error: crate::solver::SolverException,
    ) {
        self.rec.incidents.push(format!(
            "solver exception on `{}`: {error}",
            side_string(entries, failed_len)
        ));
        let mut cache: BTreeMap<usize, Probed> = BTreeMap::new();
        cache.insert(failed_len, Probed::Raised);
        match self.run_episode(entries, failed_len, cache, false) {
            Outcome::FirstBad { pos, witness } => self.finalize_prune(entries, pos, witness),
            Outcome::CutAt { pos, witness } => self.finalize_cut(entries, pos, witness),
        }
    }

    /// One failure episode over the prefixes of `entries[..failed_len]`.
    /// `bisect` episodes start from a known-unsat full conjunction and
    /// binary-search; exception episodes scan forward directly. Either
    /// way, no exact conjunction is solved twice within the episode.
    fn run_episode(
        &mut self,
        entries: &Entries,
        failed_len: usize,
        mut cache: BTreeMap<usize, Probed>,
        bisect: bool,
    ) -> Outcome {
        let base = self.stack.iter().take_while(|s| s.confirmed).count();
        debug_assert!(base < failed_len);
        if bisect {
            let result = localize(base, failed_len, |i| {
                match self.probe(entries, i, &mut cache, "probe") {
                    Probed::Sat(_) => Ok(true),
                    Probed::Unsat => Ok(false),
                    Probed::Raised => {
                        Err(crate::solver::SolverException::Capacity("probe raised".into()))
                    }
                }
            });
            if let Ok(loc) = result {
                self.rec.failed_segments.push(FailedSegment {
                    m_eff: failed_len - base,
                    probes: loc.probes,
                    first_bad: loc.first_bad,
                });
                let witness = self.episode_witness(loc.first_bad, base, &cache);
                return Outcome::FirstBad { pos: loc.first_bad, witness };
            }
            // A probe raised: fall through to the forward scan, reusing
            // every verdict the bisection already paid for.
        }
        for i in base + 1..=failed_len {
            match self.probe(entries, i, &mut cache, "scan") {
                Probed::Sat(_) => continue,
                Probed::Unsat => {
                    let witness = self.episode_witness(i, base, &cache);
                    return Outcome::FirstBad { pos: i, witness };
                }
                Probed::Raised => {
                    let witness = self.episode_witness(i, base, &cache);
                    return Outcome::CutAt { pos: i, witness };
                }
            }
        }
        unreachable!("the full conjunction is always cached as unsat or raised")
    }

    /// Decides the prefix of length `i` once per episode.
    fn probe(
        &mut self,
        entries: &Entries,
        i: usize,
        cache: &mut BTreeMap<usize, Probed>,
        purpose: &'static str,
    ) -> Probed {
        if let Some(p) = cache.get(&i) {
            return p.clone();
        }
        let probed = match self.decide(entries, i, purpose) {
            Ok(v) if v.is_sat() => Probed::Sat(v.model),
            Ok(_) => Probed::Unsat,
            Err(e) => {
                self.rec.incidents.push(format!(
                    "solver exception on `{}`: {e}",
                    side_string(entries, i)
                ));
                Probed::Raised
            }
        };
        cache.insert(i, probed.clone());
        probed
    }

    /// A model proving the prefix of `pos - 1`: the episode's probe of
    /// that exact length, or the trusted base's witness.
    fn episode_witness(
        &self,
        pos: usize,
        base: usize,
        cache: &BTreeMap<usize, Probed>,
    ) -> Option<Model> {
        if pos - 1 == base {
            return self.prefix_witness(base);
        }
        match cache.get(&(pos - 1)) {
            Some(Probed::Sat(m)) => m.clone(),
            _ => unreachable!("prefix below the first bad position was proven by a probe"),
        }
    }

    /// The side at `pos` is infeasible: confirm the proven prefix, prune
    /// the side, remember it in the ledger, and discard everything above.
    fn finalize_prune(&mut self, entries: &Entries, pos: usize, witness: Option<Model>) {
        self.confirm_prefix(pos - 1, &witness);
        self.leaf(side_string(entries, pos), EndKind::PrunedInfeasible);
        if self.config.optimize {
            self.ledger.insert(pos, entries[pos - 1].1);
        }
        self.stack.truncate(pos);
    }

    /// The side at `pos` is undecidable: confirm the proven prefix, record
    /// the incident, and abandon the side without marking it infeasible.
    fn finalize_cut(&mut self, entries: &Entries, pos: usize, witness: Option<Model>) {
        self.confirm_prefix(pos - 1, &witness);
        let sides = side_string(entries, pos);
        self.rec.incidents.push(format!("side `{sides}` abandoned undecided"));
        self.stack.truncate(pos);
    }

    /// Handles an error site. The erroring side is resolved first and
    /// never descended; the continuation (absent for `error()` calls,
    /// which end the path) is pushed as a new decision slot.
    fn error_site(&mut self, cur: &SymState, es: ErrorSite) -> Option<SymState> {
        let ErrorSite { message, site, err_constraint, err_state, cont_state } = es;
        match err_constraint {
            None => {
                if self.unconfirmed() == 0 {
                    // The whole path condition is confirmed; its witness
                    // reaches this site.
                    let witness = err_state.pc.witness().cloned();
                    self.report(&message, &site, &err_state, witness);
                    return None;
                }
                if !self.config.recheck {
                    self.report(&message, &site, &err_state, None);
                    return None;
                }
                let entries = pc_entries(&err_state);
                match self.decide(&entries, entries.len(), "err-check") {
                    Ok(v) if v.is_sat() => {
                        self.confirm_all(&v.model);
                        self.report(&message, &site, &err_state, v.model);
                    }
                    Ok(_) => self.fail(&entries, entries.len()),
                    Err(e) => self.cut_after_exception(&entries, entries.len(), e),
                }
                None
            }
            Some(errc) => {
                let cont = cont_state.expect("conditional error sites have a continuation");
                if !self.config.recheck && self.unconfirmed() > 0 {
                    // The site was reached under unconfirmed speculation
                    // and rechecking is off: report as-is, possibly
                    // spuriously, and speculate on past the site.
                    self.report(&message, &site, &err_state, None);
                    return self.push_continuation(cont);
                }
                let mut entries = pc_entries(cur);
                entries.push((errc, BranchSide::False));
                let virtual_len = entries.len();
                match self.decide(&entries, virtual_len, "err-check") {
                    Ok(v) if v.is_sat() => {
                        // The model satisfies every real prefix too.
                        self.confirm_all(&v.model);
                        self.report(&message, &site, &err_state, v.model);
                        self.push_continuation(cont)
                    }
                    Ok(_) => {
                        let mut cache: BTreeMap<usize, Probed> = BTreeMap::new();
                        cache.insert(virtual_len, Probed::Unsat);
                        match self.run_episode(&entries, virtual_len, cache, true) {
                            Outcome::FirstBad { pos, witness } if pos == virtual_len => {
                                // The error side alone is to blame: the
                                // site is unreachable, and the whole real
                                // prefix stands proven.
                                self.confirm_prefix(virtual_len - 1, &witness);
                                self.leaf(
                                    err_state.pc.side_string(),
                                    EndKind::PrunedInfeasible,
                                );
                                if self.config.optimize {
                                    self.entailed_continuation(cont, witness)
                                } else {
                                    self.push_continuation(cont)
                                }
                            }
                            Outcome::FirstBad { pos, witness } => {
                                self.finalize_prune(&entries, pos, witness);
                                None
                            }
                            Outcome::CutAt { pos, witness } => {
                                self.finalize_cut(&entries, pos, witness);
                                None
                            }
                        }
                    }
                    Err(e) => {
                        // The error side's feasibility is unknowable right
                        // now; salvage the real prefixes, then either cut
                        // a real side or abandon just the error side.
                        let mut cache: BTreeMap<usize, Probed> = BTreeMap::new();
                        cache.insert(virtual_len, Probed::Raised);
                        self.rec.incidents.push(format!(
                            "error side `{}` undecided: {e}",
                            err_state.pc.side_string()
                        ));
                        match self.run_episode(&entries, virtual_len, cache, false) {
                            Outcome::FirstBad { pos, witness } => {
                                self.finalize_prune(&entries, pos, witness);
                                None
                            }
                            Outcome::CutAt { pos, witness } if pos == virtual_len => {
                                // Every real prefix is fine; only the
                                // error side is abandoned.
                                self.confirm_prefix(virtual_len - 1, &witness);
                                self.push_continuation(cont)
                            }
                            Outcome::CutAt { pos, witness } => {
                                self.finalize_cut(&entries, pos, witness);
                                None
                            }
                        }
                    }
                }
            }
        }
    }

    /// Pushes the continuation past a conditional error site as an
    /// ordinary unconfirmed decision.
    fn push_continuation(&mut self, cont: SymState) -> Option<SymState> {
        self.stack.push(Slot::unconfirmed(&cont, None));
        self.speculative_append(cont)
    }

    /// Pushes the continuation as already-entailed: the error side was
    /// just proven infeasible, so the prefix implies the continuation's
    /// constraint and no solve is needed.
    fn entailed_continuation(
        &mut self,
        mut cont: SymState,
        witness: Option<Model>,
    ) -> Option<SymState> {
        self.rec.stats.avoided += 1;
        self.rec.avoided_sides.push(cont.pc.side_string());
        if self.config.absurdity_confirm_resets_depth {
            cont.pc.set_sat(witness.clone());
            self.stack.push(Slot {
                taken: cont.clone(),
                pending: None,
                confirmed: true,
                witness,
            });
        } else {
            self.stack.push(Slot::unconfirmed(&cont, None));
        }
        Some(cont)
    }
}
