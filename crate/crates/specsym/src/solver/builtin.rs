//! The built-in decision procedure: branch-and-prune with interval
//! propagation over a bounded box domain.
//!
//! Every symbol ranges over a finite box (default `[-64, 63]`), so
//! exhaustive branching terminates and both verdicts are definitive *for
//! that box*. Propagation only discards assignments that violate some
//! conjunct, so it never loses a solution; disequalities don't propagate
//! and are checked once an assignment is complete.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::lang::RelOp;
use crate::symcore::{Constraint, Model};

use super::enumerate::{conjunction_symbols, satisfies};
use super::verdict::{SatStatus, Solver, SolverException, SolverVerdict};

/// One pruning row `Σ coeff·var ≤ bound` (vars by index).
struct Row {
    terms: Vec<(usize, i128)>,
    bound: i128,
}

pub struct BuiltinSolver {
    domain_lo: i64,
    domain_hi: i64,
    node_cap: u64,
}

impl Default for BuiltinSolver {
    fn default() -> BuiltinSolver {
        BuiltinSolver { domain_lo: -64, domain_hi: 63, node_cap: 1_000_000 }
    }
}

impl BuiltinSolver {
    /// A solver deciding satisfiability over `[lo, hi]` per symbol.
    pub fn with_domain(lo: i64, hi: i64) -> BuiltinSolver {
        assert!(lo <= hi, "empty solver domain");
        BuiltinSolver { domain_lo: lo, domain_hi: hi, ..BuiltinSolver::default() }
    }

    pub fn with_node_cap(mut self, cap: u64) -> BuiltinSolver {
        self.node_cap = cap;
        self
    }

    pub fn domain(&self) -> (i64, i64) {
        (self.domain_lo, self.domain_hi)
    }
}

impl Solver for BuiltinSolver {
    fn solve(&mut self, constraints: &[Constraint]) -> Result<SolverVerdict, SolverException> {
        let start = Instant::now();
        let symbols = conjunction_symbols(constraints);
        let rows = lessequal_rows(constraints, &symbols);
        let intervals: Vec<(i128, i128)> =
            vec![(i128::from(self.domain_lo), i128::from(self.domain_hi)); symbols.len()];
        let mut budget = self.node_cap;
        let model = search(intervals, &rows, constraints, &symbols, &mut budget)?;
        if let Some(m) = &model {
            assert!(satisfies(constraints, m), "solver produced a non-satisfying model");
        }
        let status = if model.is_some() { SatStatus::Sat } else { SatStatus::Unsat };
        Ok(SolverVerdict { status, model, elapsed: start.elapsed() })
    }

    fn name(&self) -> &'static str {
        "builtin"
    }
}

/// Lowers each conjunct to zero or more `≤`-rows used for pruning.
fn lessequal_rows(constraints: &[Constraint], symbols: &[String]) -> Vec<Row> {
    let index: BTreeMap<&str, usize> =
        symbols.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut rows = Vec::new();
    let mut push = |coeffs: &BTreeMap<String, i128>, negate: bool, bound: i128| {
        let terms = coeffs
            .iter()
            .map(|(name, &c)| (index[name.as_str()], if negate { -c } else { c }))
            .collect();
        rows.push(Row { terms, bound });
    };
    for c in constraints {
        match c.rel {
            RelOp::Le => push(&c.coeffs, false, c.rhs),
            RelOp::Lt => push(&c.coeffs, false, c.rhs - 1),
            RelOp::Ge => push(&c.coeffs, true, -c.rhs),
            RelOp::Gt => push(&c.coeffs, true, -(c.rhs + 1)),
            RelOp::Eq => {
                push(&c.coeffs, false, c.rhs);
                push(&c.coeffs, true, -c.rhs);
            }
            // Disequalities prune nothing; they are re-checked on complete
            // assignments.
            RelOp::Ne => {}
        }
    }
    rows
}

/// Shrinks `intervals` to a propagation fixpoint. Returns `false` if some
/// interval became empty (the box contains no solution).
fn propagate(intervals: &mut [(i128, i128)], rows: &[Row]) -> bool {
    let mut changed = true;
    while changed {
        changed = false;
        for row in rows {
            // Minimal attainable value of the row's left-hand side.
            let mut total_min = 0i128;
            for &(i, c) in &row.terms {
                let (lo, hi) = intervals[i];
                total_min += if c > 0 { c * lo } else { c * hi };
            }
            if total_min > row.bound {
                return false;
            }
            for &(i, c) in &row.terms {
                let (lo, hi) = intervals[i];
                let term_min = if c > 0 { c * lo } else { c * hi };
                // c·x ≤ bound − (minimum of the other terms)
                let budget = row.bound - (total_min - term_min);
                if c > 0 {
                    let new_hi = budget.div_euclid(c);
                    if new_hi < hi {
                        intervals[i].1 = new_hi;
                        changed = true;
                    }
                } else {
                    let new_lo = ceil_div(budget, c);
                    if new_lo > lo {
                        intervals[i].0 = new_lo;
                        changed = true;
                    }
                }
                let (lo, hi) = intervals[i];
                if lo > hi {
                    return false;
                }
            }
        }
    }
    true
}

/// Exact ⌈a/b⌉ for b ≠ 0.
fn ceil_div(a: i128, b: i128) -> i128 {
    let (a, b) = if b < 0 { (-a, -b) } else { (a, b) };
    -(-a).div_euclid(b)
}

/// Depth-first branch-and-prune. Returns the first satisfying assignment
/// found (deterministic: first symbol in sorted order, lower half first).
fn search(
    mut intervals: Vec<(i128, i128)>,
    rows: &[Row],
    constraints: &[Constraint],
    symbols: &[String],
    budget: &mut u64,
) -> Result<Option<Model>, SolverException> {
    if *budget == 0 {
        return Err(SolverException::Capacity(format!(
            "branch-and-prune node budget exhausted on {} conjuncts",
            constraints.len()
        )));
    }
    *budget -= 1;
    if !propagate(&mut intervals, rows) {
        return Ok(None);
    }
    match intervals.iter().position(|&(lo, hi)| lo < hi) {
        None => {
            // Complete assignment: validate every conjunct, including the
            // disequalities propagation ignored.
            let model: Model = symbols
                .iter()
                .zip(&intervals)
                .map(|(s, &(lo, _))| (s.clone(), lo as i64))
                .collect();
            Ok(if satisfies(constraints, &model) { Some(model) } else { None })
        }
        Some(i) => {
            let (lo, hi) = intervals[i];
            let mid = lo + (hi - lo) / 2;
            let mut lower = intervals.clone();
            lower[i] = (lo, mid);
            if let Some(m) = search(lower, rows, constraints, symbols, budget)? {
                return Ok(Some(m));
            }
            intervals[i] = (mid + 1, hi);
            search(intervals, rows, constraints, symbols, budget)
        }
    }
}
