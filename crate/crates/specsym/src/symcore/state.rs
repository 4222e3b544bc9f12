//! Symbolic program states and the single-step transition function.
//!
//! Programs are compiled to a flat instruction vector with explicit jump
//! targets; [`step`] advances one state by one instruction and reports
//! whether execution continues linearly, forks at a branch, terminates,
//! or reaches an error site.

use std::collections::BTreeMap;

use crate::lang::{Block, Cond, Expr, Program, RelOp, Stmt};

use super::constraint::{Constraint, Normalized};
use super::linexpr::LinExpr;
use super::pc::{BranchSide, Model, PathCondition};

/// A symbolic value: a linear form over the input symbols, or an
/// unevaluated integer division of two symbolic values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymExpr {
    Linear(LinExpr),
    Div(Box<SymExpr>, Box<SymExpr>),
}

impl SymExpr {
    fn linear(self) -> LinExpr {
        match self {
            SymExpr::Linear(l) => l,
            SymExpr::Div(..) => {
                panic!("division node where a linear form was required; divisions must be hoisted")
            }
        }
    }
}

/// Evaluates a division-free expression under `env` to a linear form.
pub fn eval_linear(env: &BTreeMap<String, LinExpr>, expr: &Expr) -> LinExpr {
    eval(env, expr).linear()
}

/// Evaluates an expression under `env` to a symbolic value.
///
/// Panics on unbound variables and on symbolic-times-symbolic products;
/// both are ruled out before execution (definite-assignment analysis and
/// the linearity check in the parser).
pub fn eval(env: &BTreeMap<String, LinExpr>, expr: &Expr) -> SymExpr {
    match expr {
        Expr::Int(n) => SymExpr::Linear(LinExpr::constant(i128::from(*n))),
        Expr::Var(name) => SymExpr::Linear(
            env.get(name)
                .unwrap_or_else(|| panic!("variable `{name}` read before assignment"))
                .clone(),
        ),
        Expr::Neg(e) => SymExpr::Linear(eval(env, e).linear().neg()),
        Expr::Add(a, b) => SymExpr::Linear(eval(env, a).linear().add(&eval(env, b).linear())),
        Expr::Sub(a, b) => SymExpr::Linear(eval(env, a).linear().sub(&eval(env, b).linear())),
        Expr::Mul(a, b) => {
            let la = eval(env, a).linear();
            let lb = eval(env, b).linear();
            if let Some(k) = la.as_constant() {
                SymExpr::Linear(lb.scale(k))
            } else if let Some(k) = lb.as_constant() {
                SymExpr::Linear(la.scale(k))
            } else {
                panic!("product of two symbolic values is not linear")
            }
        }
        Expr::Div(a, b) => SymExpr::Div(Box::new(eval(env, a)), Box::new(eval(env, b))),
    }
}

/// Builds the constraint for a condition under `env`, or its concrete truth
/// value if it involves no symbols.
pub fn eval_cond(env: &BTreeMap<String, LinExpr>, cond: &Cond) -> Normalized {
    let lhs = eval_linear(env, &cond.lhs);
    let rhs = eval_linear(env, &cond.rhs);
    Constraint::compare(&lhs, cond.op, &rhs)
}

/// Distinguishes loop back-edges (bounded) from plain conditionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    If,
    Loop { loop_id: usize },
}

/// One flat instruction of a compiled program.
#[derive(Debug, Clone)]
pub enum Op {
    Assign { name: String, value: Expr },
    /// `name = num / den` where the right-hand side's root is a division;
    /// reaching it with a possibly-zero divisor is an error site.
    AssignDiv { name: String, num: Expr, den: Expr, site: String },
    Branch { cond: Cond, kind: BranchKind, true_target: usize, false_target: usize, site: String },
    Assert { cond: Cond, site: String },
    Error { message: String, site: String },
    Print { value: Expr },
    Jump { target: usize },
    End,
}

/// A program lowered to flat instructions with jump targets resolved.
#[derive(Debug, Clone)]
pub struct CompiledProgram {
    pub ops: Vec<Op>,
    pub sym_inputs: Vec<String>,
    pub loop_count: usize,
}

struct Compiler {
    ops: Vec<Op>,
    loop_count: usize,
    if_count: usize,
    while_count: usize,
    assert_count: usize,
    div_count: usize,
    error_count: usize,
}

impl Compiler {
    fn emit_block(&mut self, block: &Block) {
        for stmt in block {
            self.emit_stmt(stmt);
        }
    }

    fn emit_stmt(&mut self, stmt: &Stmt) {
        match stmt {
            Stmt::Assign { name, value } => {
                if let Expr::Div(num, den) = value {
                    let site = format!("div#{}", self.div_count);
                    self.div_count += 1;
                    self.ops.push(Op::AssignDiv {
                        name: name.clone(),
                        num: (**num).clone(),
                        den: (**den).clone(),
                        site,
                    });
                } else {
                    self.ops.push(Op::Assign { name: name.clone(), value: value.clone() });
                }
            }
            Stmt::If { cond, then_block, else_block } => {
                let site = format!("if#{}", self.if_count);
                self.if_count += 1;
                let branch_at = self.ops.len();
                self.ops.push(Op::Jump { target: 0 }); // placeholder
                let then_start = self.ops.len();
                self.emit_block(then_block);
                if else_block.is_empty() {
                    let join = self.ops.len();
                    self.ops[branch_at] = Op::Branch {
                        cond: cond.clone(),
                        kind: BranchKind::If,
                        true_target: then_start,
                        false_target: join,
                        site,
                    };
                } else {
                    let exit_jump_at = self.ops.len();
                    self.ops.push(Op::Jump { target: 0 }); // placeholder
                    let else_start = self.ops.len();
                    self.emit_block(else_block);
                    let join = self.ops.len();
                    self.ops[branch_at] = Op::Branch {
                        cond: cond.clone(),
                        kind: BranchKind::If,
                        true_target: then_start,
                        false_target: else_start,
                        site,
                    };
                    self.ops[exit_jump_at] = Op::Jump { target: join };
                }
            }
            Stmt::While { cond, body } => {
                let site = format!("while#{}", self.while_count);
                self.while_count += 1;
                let loop_id = self.loop_count;
                self.loop_count += 1;
                let head = self.ops.len();
                self.ops.push(Op::Jump { target: 0 }); // placeholder
                let body_start = self.ops.len();
                self.emit_block(body);
                self.ops.push(Op::Jump { target: head });
                let exit = self.ops.len();
                self.ops[head] = Op::Branch {
                    cond: cond.clone(),
                    kind: BranchKind::Loop { loop_id },
                    true_target: body_start,
                    false_target: exit,
                    site,
                };
            }
            Stmt::Assert { cond } => {
                let site = format!("assert#{}", self.assert_count);
                self.assert_count += 1;
                self.ops.push(Op::Assert { cond: cond.clone(), site });
            }
            Stmt::Error { message } => {
                let site = format!("error#{}", self.error_count);
                self.error_count += 1;
                self.ops.push(Op::Error { message: message.clone(), site });
            }
            Stmt::Print { value } => {
                self.ops.push(Op::Print { value: value.clone() });
            }
        }
    }
}

/// Lowers a validated, division-hoisted program to flat instructions.
pub fn compile(program: &Program) -> CompiledProgram {
    let mut c = Compiler {
        ops: Vec::new(),
        loop_count: 0,
        if_count: 0,
        while_count: 0,
        assert_count: 0,
        div_count: 0,
        error_count: 0,
    };
    c.emit_block(&program.body);
    c.ops.push(Op::End);
    CompiledProgram { ops: c.ops, sym_inputs: program.sym_inputs.clone(), loop_count: c.loop_count }
}

/// A symbolic execution state: variable valuation, path condition, control
/// point, and per-path bookkeeping. Cloning is cheap enough for forking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymState {
    pub env: BTreeMap<String, LinExpr>,
    pub pc: PathCondition,
    ip: usize,
    loop_counters: Vec<u64>,
    /// Branches taken since the last confirmed feasibility check.
    pub speculation_depth: u32,
    /// Instructions executed along this path.
    pub instr_count: u64,
    fresh_quotients: u32,
}

impl SymState {
    /// The initial state: every declared symbolic input maps to its own
    /// symbol; everything else is unbound.
    pub fn initial(program: &CompiledProgram) -> SymState {
        let env = program
            .sym_inputs
            .iter()
            .map(|name| (name.clone(), LinExpr::symbol(name)))
            .collect();
        SymState {
            env,
            pc: PathCondition::empty(),
            ip: 0,
            loop_counters: vec![0; program.loop_count],
            speculation_depth: 0,
            instr_count: 0,
            fresh_quotients: 0,
        }
    }

    /// The next provenance id for a constraint appended to this state.
    pub fn next_branch_id(&self) -> u64 {
        self.pc.len() as u64 + 1
    }

    fn fresh_quotient(&mut self) -> LinExpr {
        let name = format!("q${}", self.fresh_quotients);
        self.fresh_quotients += 1;
        LinExpr::symbol(&name)
    }

    /// Concretizes the state's variables under `model`; symbols missing
    /// from the model (including fresh quotient symbols) default to 0.
    pub fn concretize(&self, model: &Model) -> BTreeMap<String, i128> {
        self.env.iter().map(|(name, lin)| (name.clone(), lin.eval(model))).collect()
    }
}

/// The two successor states of a feasible-looking two-way fork.
#[derive(Debug, Clone)]
pub struct BranchOutcome {
    pub branch_id: u64,
    pub site: String,
    pub false_state: SymState,
    pub true_state: SymState,
}

/// A reachable error site: a failing assertion, a possibly-zero divisor,
/// or an explicit `error()` call.
#[derive(Debug, Clone)]
pub struct ErrorSite {
    pub message: String,
    pub site: String,
    /// The constraint under which the error fires, or `None` when it fires
    /// unconditionally on this path.
    pub err_constraint: Option<Constraint>,
    /// State at the error point, with `err_constraint` appended when present.
    pub err_state: SymState,
    /// State continuing past the site (complement appended), when the error
    /// is conditional.
    pub cont_state: Option<SymState>,
}

/// Result of advancing a state by one instruction.
#[derive(Debug, Clone)]
pub enum StepResult {
    Next(SymState),
    Branch(BranchOutcome),
    PathEnd(SymState),
    ErrorSite(ErrorSite),
}

/// Forks `state` on `constraint`, appending it and its complement with the
/// same provenance id. The false successor gets the complement.
fn fork(
    state: &SymState,
    constraint: &Constraint,
    true_ip: usize,
    false_ip: usize,
) -> (SymState, SymState) {
    let id = state.next_branch_id();
    let mut t = state.clone();
    t.ip = true_ip;
    t.pc = state
        .pc
        .append(constraint.clone(), id, BranchSide::True)
        .expect("fresh provenance id");
    let mut f = state.clone();
    f.ip = false_ip;
    f.pc = state
        .pc
        .append(constraint.complement(), id, BranchSide::False)
        .expect("fresh provenance id");
    (f, t)
}

/// Advances `state` by one instruction of `program`. Loops are cut off
/// after `loop_bound` iterations: a loop test reached with an exhausted
/// counter ends the path.
pub fn step(state: &SymState, program: &CompiledProgram, loop_bound: u64) -> StepResult {
    let op = &program.ops[state.ip];
    let mut next = state.clone();
    next.instr_count += 1;
    match op {
        Op::Assign { name, value } => {
            let v = eval_linear(&state.env, value);
            next.env.insert(name.clone(), v);
            next.ip += 1;
            StepResult::Next(next)
        }
        Op::AssignDiv { name, num, den, site } => {
            let num_l = eval_linear(&state.env, num);
            let den_l = eval_linear(&state.env, den);
            step_division(next, name, &num_l, &den_l, site)
        }
        Op::Branch { cond, kind, true_target, false_target, site } => {
            if let BranchKind::Loop { loop_id } = kind {
                if state.loop_counters[*loop_id] == loop_bound {
                    return StepResult::PathEnd(next);
                }
            }
            match eval_cond(&state.env, cond) {
                Normalized::Trivial(truth) => {
                    advance_loop_counter(&mut next, kind, truth);
                    next.ip = if truth { *true_target } else { *false_target };
                    StepResult::Next(next)
                }
                Normalized::Constraint(c) => {
                    let (mut f, mut t) = fork(&next, &c, *true_target, *false_target);
                    advance_loop_counter(&mut t, kind, true);
                    advance_loop_counter(&mut f, kind, false);
                    StepResult::Branch(BranchOutcome {
                        branch_id: state.next_branch_id(),
                        site: site.clone(),
                        false_state: f,
                        true_state: t,
                    })
                }
            }
        }
        Op::Assert { cond, site } => {
            next.ip += 1;
            match eval_cond(&state.env, cond) {
                Normalized::Trivial(true) => StepResult::Next(next),
                Normalized::Trivial(false) => {
                    let mut err_state = next;
                    err_state.ip = state.ip; // stay at the failing site
                    StepResult::ErrorSite(ErrorSite {
                        message: format!("assertion failed: {cond}"),
                        site: site.clone(),
                        err_constraint: None,
                        err_state,
                        cont_state: None,
                    })
                }
                Normalized::Constraint(c) => {
                    let (err_state, cont_state) = fork(&next, &c, next.ip, state.ip);
                    StepResult::ErrorSite(ErrorSite {
                        message: format!("assertion failed: {cond}"),
                        site: site.clone(),
                        err_constraint: Some(c.complement()),
                        err_state,
                        cont_state: Some(cont_state),
                    })
                }
            }
        }
        Op::Error { message, site } => {
            let mut err_state = next;
            err_state.ip = state.ip;
            StepResult::ErrorSite(ErrorSite {
                message: message.clone(),
                site: site.clone(),
                err_constraint: None,
                err_state,
                cont_state: None,
            })
        }
        Op::Print { .. } => {
            next.ip += 1;
            StepResult::Next(next)
        }
        Op::Jump { target } => {
            next.ip = *target;
            StepResult::Next(next)
        }
        Op::End => StepResult::PathEnd(next),
    }
}

fn advance_loop_counter(state: &mut SymState, kind: &BranchKind, took_true: bool) {
    if let BranchKind::Loop { loop_id } = kind {
        if took_true {
            state.loop_counters[*loop_id] += 1;
        } else {
            state.loop_counters[*loop_id] = 0;
        }
    }
}

fn step_division(
    mut next: SymState,
    name: &str,
    num: &LinExpr,
    den: &LinExpr,
    site: &str,
) -> StepResult {
    next.ip += 1;
    if let Some(d) = den.as_constant() {
        if d == 0 {
            let mut err_state = next;
            err_state.ip -= 1;
            return StepResult::ErrorSite(ErrorSite {
                message: "division by zero".to_string(),
                site: site.to_string(),
                err_constraint: None,
                err_state,
                cont_state: None,
            });
        }
        let value = match num.as_constant() {
            // Both sides concrete: fold to the truncated quotient.
            Some(n) => LinExpr::constant(quot_trunc(n, d)),
            // Concrete nonzero divisor, symbolic numerator: the quotient is
            // a fresh unconstrained symbol; no error side exists.
            None => next.fresh_quotient(),
        };
        next.env.insert(name.to_string(), value);
        return StepResult::Next(next);
    }
    // Symbolic divisor: fork on den = 0.
    let zero = match Constraint::compare(den, RelOp::Eq, &LinExpr::constant(0)) {
        Normalized::Constraint(c) => c,
        // A divisor like 2*x + 1 can never be zero (divisibility), so the
        // error side vanishes and the quotient is simply a fresh symbol.
        Normalized::Trivial(false) => {
            let q = next.fresh_quotient();
            next.env.insert(name.to_string(), q);
            return StepResult::Next(next);
        }
        // den = 0 can only be trivially true for a constant divisor, which
        // was handled above.
        Normalized::Trivial(true) => unreachable!(),
    };
    let id = next.next_branch_id();
    let mut err_state = next.clone();
    err_state.ip -= 1;
    err_state.pc = next
        .pc
        .append(zero.clone(), id, BranchSide::False)
        .expect("fresh provenance id");
    let mut cont = next.clone();
    cont.pc = next
        .pc
        .append(zero.complement(), id, BranchSide::True)
        .expect("fresh provenance id");
    let q = cont.fresh_quotient();
    cont.env.insert(name.to_string(), q);
    StepResult::ErrorSite(ErrorSite {
        message: "division by zero".to_string(),
        site: site.to_string(),
        err_constraint: Some(zero),
        err_state,
        cont_state: Some(cont),
    })
}

/// Truncating integer division (the host `/` semantics).
fn quot_trunc(n: i128, d: i128) -> i128 {
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;

    fn compiled(src: &str) -> CompiledProgram {
        compile(&parse_program(src).unwrap())
    }

    /// Runs straight-line steps until something other than `Next` happens.
    fn run_to_event(program: &CompiledProgram, loop_bound: u64) -> (SymState, StepResult) {
        let mut state = SymState::initial(program);
        loop {
            match step(&state, program, loop_bound) {
                StepResult::Next(s) => state = s,
                other => return (state, other),
            }
        }
    }

    #[test]
    fn negation_yields_negated_linear_form() {
        let program = compiled("sym int x;\ny = 0 - x;\n");
        let (state, result) = run_to_event(&program, 4);
        assert!(matches!(result, StepResult::PathEnd(_)));
        assert_eq!(state.env["y"], LinExpr::symbol("x").neg());
    }

    #[test]
    fn conditional_forks_on_complementary_constraints() {
        let program = compiled("sym int x;\nif (x >= 0) { y = 1; } else { y = 2; }\n");
        let (_, result) = run_to_event(&program, 4);
        let StepResult::Branch(out) = result else { panic!("expected a fork") };
        assert_eq!(out.branch_id, 1);
        assert_eq!(out.site, "if#0");
        let t = &out.true_state.pc.entries()[0].constraint;
        let f = &out.false_state.pc.entries()[0].constraint;
        assert_eq!(format!("{t}"), "x >= 0");
        assert_eq!(*f, t.complement());
        assert_eq!(out.true_state.pc.entries()[0].branch_id, 1);
        assert_eq!(out.false_state.pc.entries()[0].branch_id, 1);
    }

    #[test]
    fn concrete_conditions_do_not_fork() {
        let program = compiled("sym int x;\ny = 3;\nif (y > 2) { z = x; } else { z = 0 - x; }\n");
        let (state, result) = run_to_event(&program, 4);
        assert!(matches!(result, StepResult::PathEnd(_)));
        assert_eq!(state.env["z"], LinExpr::symbol("x"));
        assert!(state.pc.is_empty());
    }

    #[test]
    fn explicit_error_reports_unconditionally() {
        let program = compiled("sym int x;\nerror(\"boom\");\n");
        let (_, result) = run_to_event(&program, 4);
        let StepResult::ErrorSite(site) = result else { panic!("expected an error site") };
        assert_eq!(site.message, "boom");
        assert_eq!(site.site, "error#0");
        assert!(site.err_constraint.is_none());
        assert!(site.cont_state.is_none());
    }

    #[test]
    fn assertion_forks_into_error_and_continuation() {
        let program = compiled("sym int x;\nassert(x > 0);\ny = x;\n");
        let (_, result) = run_to_event(&program, 4);
        let StepResult::ErrorSite(site) = result else { panic!("expected an error site") };
        let err = site.err_constraint.unwrap();
        assert_eq!(format!("{err}"), "x <= 0");
        let err_pc = site.err_state.pc;
        assert_eq!(err_pc.entries()[0].constraint, err);
        assert_eq!(err_pc.entries()[0].side, BranchSide::False);
        let cont = site.cont_state.unwrap();
        assert_eq!(format!("{}", cont.pc.entries()[0].constraint), "x > 0");
        assert_eq!(cont.pc.entries()[0].side, BranchSide::True);
    }

    #[test]
    fn symbolic_divisor_forks_on_zero_and_binds_fresh_quotient() {
        let program = compiled("sym int a;\nsym int b;\nc = a / b;\nd = c + 1;\n");
        let (_, result) = run_to_event(&program, 4);
        let StepResult::ErrorSite(site) = result else { panic!("expected an error site") };
        assert_eq!(site.message, "division by zero");
        assert_eq!(site.site, "div#0");
        assert_eq!(format!("{}", site.err_constraint.unwrap()), "b = 0");
        let cont = site.cont_state.unwrap();
        assert_eq!(cont.env["c"], LinExpr::symbol("q$0"));
        assert_eq!(format!("{}", cont.pc.entries()[0].constraint), "b != 0");
    }

    #[test]
    fn concrete_division_folds_and_truncates() {
        let program = compiled("x = 0 - 7;\ny = x / 2;\n");
        let (state, result) = run_to_event(&program, 4);
        assert!(matches!(result, StepResult::PathEnd(_)));
        assert_eq!(state.env["y"], LinExpr::constant(-3));
    }

    #[test]
    fn concrete_zero_divisor_is_an_unconditional_error() {
        let program = compiled("x = 1 / 0;\n");
        let (_, result) = run_to_event(&program, 4);
        let StepResult::ErrorSite(site) = result else { panic!("expected an error site") };
        assert!(site.err_constraint.is_none());
        assert!(site.cont_state.is_none());
    }

    #[test]
    fn provably_nonzero_symbolic_divisor_has_no_error_side() {
        let program = compiled("sym int x;\nd = 2 * x + 1;\ny = x / d;\n");
        let (state, result) = run_to_event(&program, 4);
        assert!(matches!(result, StepResult::PathEnd(_)));
        assert_eq!(state.env["y"], LinExpr::symbol("q$0"));
        assert!(state.pc.is_empty());
    }

    #[test]
    fn symbolic_numerator_over_concrete_divisor_gets_fresh_symbol() {
        let program = compiled("sym int a;\nb = a / 3;\n");
        let (state, result) = run_to_event(&program, 4);
        assert!(matches!(result, StepResult::PathEnd(_)));
        assert_eq!(state.env["b"], LinExpr::symbol("q$0"));
        assert!(state.pc.is_empty());
    }

    #[test]
    fn loop_test_with_exhausted_counter_ends_the_path() {
        let program = compiled("sym int n;\ni = 0;\nwhile (i < n) { i = i + 1; }\n");
        let bound = 2;
        // Drive the all-true path: take the loop body every time.
        let mut state = SymState::initial(&program);
        let mut forks = 0;
        loop {
            match step(&state, &program, bound) {
                StepResult::Next(s) => state = s,
                StepResult::Branch(out) => {
                    forks += 1;
                    state = out.true_state;
                }
                StepResult::PathEnd(_) => break,
                StepResult::ErrorSite(_) => panic!("no error sites here"),
            }
        }
        assert_eq!(forks, bound);
        assert_eq!(state.pc.side_string(), "TT");
    }

    #[test]
    fn loop_exit_resets_counter_for_later_reentry() {
        let program = compiled(
            "sym int n;\nk = 0;\nwhile (k < 2) {\n  i = 0;\n  while (i < n) { i = i + 1; }\n  k = k + 1;\n}\n",
        );
        // Drive the inner loop through one body pass and one exit per outer
        // iteration (sides T, F, T, F). The second iteration's body pass is
        // only admissible at bound 2 if the first exit reset the counter.
        let mut state = SymState::initial(&program);
        let mut forks = 0;
        loop {
            match step(&state, &program, 2) {
                StepResult::Next(s) => state = s,
                StepResult::Branch(out) => {
                    forks += 1;
                    state = if forks % 2 == 1 { out.true_state } else { out.false_state };
                }
                StepResult::PathEnd(_) => break,
                StepResult::ErrorSite(_) => panic!("no error sites here"),
            }
        }
        assert_eq!(forks, 4);
        assert_eq!(state.pc.side_string(), "TFTF");
    }

    #[test]
    fn instruction_count_advances_on_both_fork_sides() {
        let program = compiled("sym int x;\nif (x > 0) { y = 1; }\n");
        let (state, result) = run_to_event(&program, 4);
        let StepResult::Branch(out) = result else { panic!("expected a fork") };
        assert_eq!(out.true_state.instr_count, state.instr_count + 1);
        assert_eq!(out.false_state.instr_count, state.instr_count + 1);
    }
}
