//! Concretization soundness on the corpus: any model the solver produces
//! for an explored path prefix, when fed to a plain concrete interpreter
//! of the source language, drives execution along exactly that prefix.
//!
//! The interpreter here is the independent oracle: it evaluates `.sx`
//! programs over `i64` with no constraints, path conditions, or solver
//! involved, recording one letter per decision the way the engine does —
//! `T`/`F` at conditionals and asserts (true side `T`), and at a
//! division's zero check (`F` is the error side). It deliberately covers
//! only what the corpus exercises: every condition symbol-dependent, no
//! loops, divisors that are not provably nonzero.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use specsym::lang::{self, Cond, Expr, Program, RelOp, Stmt};
use specsym::search::{explore_source, ExplorationOrder, SearchConfig, Strategy};
use specsym::solver::{BuiltinSolver, Solver, SolverException, SolverVerdict};
use specsym::symcore::{Constraint, Model};

// ---------------------------------------------------------------------
// Concrete interpreter oracle
// ---------------------------------------------------------------------

/// How a concrete run ended.
#[derive(Debug, PartialEq, Eq)]
enum ConcreteEnd {
    Completed,
    Errored,
}

struct Concrete {
    env: BTreeMap<String, i64>,
    letters: String,
}

/// Runs `program` on the given inputs (missing symbols default to 0) and
/// returns the decision letters in execution order plus how the run ended.
fn run_concrete(program: &Program, inputs: &Model) -> (String, ConcreteEnd) {
    let mut run = Concrete { env: BTreeMap::new(), letters: String::new() };
    for name in &program.sym_inputs {
        run.env.insert(name.clone(), inputs.get(name).copied().unwrap_or(0));
    }
    let end = run.block(&program.body);
    (run.letters, end)
}

impl Concrete {
    fn block(&mut self, block: &[Stmt]) -> ConcreteEnd {
        for stmt in block {
            match stmt {
                Stmt::Assign { name, value } => {
                    // After parse-time hoisting a division appears only at
                    // the assignment root; its zero check is a decision.
                    if let Expr::Div(num, den) = value {
                        let d = self.eval(den);
                        if d == 0 {
                            self.letters.push('F');
                            return ConcreteEnd::Errored;
                        }
                        self.letters.push('T');
                        let n = self.eval(num);
                        self.env.insert(name.clone(), n / d);
                    } else {
                        let v = self.eval(value);
                        self.env.insert(name.clone(), v);
                    }
                }
                Stmt::If { cond, then_block, else_block } => {
                    let taken = if self.cond(cond) {
                        self.letters.push('T');
                        then_block
                    } else {
                        self.letters.push('F');
                        else_block
                    };
                    if self.block(taken) == ConcreteEnd::Errored {
                        return ConcreteEnd::Errored;
                    }
                }
                Stmt::Assert { cond } => {
                    if self.cond(cond) {
                        self.letters.push('T');
                    } else {
                        self.letters.push('F');
                        return ConcreteEnd::Errored;
                    }
                }
                Stmt::Error { .. } => return ConcreteEnd::Errored,
                Stmt::Print { .. } => {}
                Stmt::While { .. } => {
                    panic!("the concrete oracle does not model loops; the corpus is loop-free")
                }
            }
        }
        ConcreteEnd::Completed
    }

    fn cond(&mut self, cond: &Cond) -> bool {
        let lhs = self.eval(&cond.lhs);
        let rhs = self.eval(&cond.rhs);
        match cond.op {
            RelOp::Lt => lhs < rhs,
            RelOp::Le => lhs <= rhs,
            RelOp::Gt => lhs > rhs,
            RelOp::Ge => lhs >= rhs,
            RelOp::Eq => lhs == rhs,
            RelOp::Ne => lhs != rhs,
        }
    }

    fn eval(&self, expr: &Expr) -> i64 {
        match expr {
            Expr::Int(v) => *v,
            Expr::Var(name) => *self.env.get(name).expect("use before def is rejected"),
            Expr::Neg(e) => -self.eval(e),
            Expr::Add(a, b) => self.eval(a) + self.eval(b),
            Expr::Sub(a, b) => self.eval(a) - self.eval(b),
            Expr::Mul(a, b) => self.eval(a) * self.eval(b),
            Expr::Div(..) => panic!("hoisting keeps divisions at assignment roots"),
        }
    }
}

// ---------------------------------------------------------------------
// Model capture
// ---------------------------------------------------------------------

/// Wraps the real solver and keeps every verdict's model, in issue order,
/// so captured models line up index-for-index with the recorded queries.
struct CapturingSolver {
    inner: BuiltinSolver,
    models: Vec<Option<Model>>,
}

impl Solver for CapturingSolver {
    fn solve(&mut self, constraints: &[Constraint]) -> Result<SolverVerdict, SolverException> {
        let verdict = self.inner.solve(constraints)?;
        self.models.push(verdict.model.clone());
        Ok(verdict)
    }

    fn name(&self) -> &'static str {
        "capturing"
    }
}

// ---------------------------------------------------------------------
// The property
// ---------------------------------------------------------------------

fn corpus_programs() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut programs = Vec::new();
    for entry in fs::read_dir(&dir).expect("corpus directory") {
        let path = entry.expect("entry").path();
        if path.extension().is_some_and(|e| e == "sx") {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            programs.push((name, fs::read_to_string(&path).expect("read program")));
        }
    }
    programs.sort();
    assert!(!programs.is_empty());
    programs
}

fn configs() -> Vec<SearchConfig> {
    let mut configs = vec![SearchConfig { strategy: Strategy::Pure, ..SearchConfig::default() }];
    for (depth, order, optimize) in [
        (2, ExplorationOrder::FalseFirst, false),
        (3, ExplorationOrder::FalseFirst, true),
        (3, ExplorationOrder::TrueFirst, false),
        (5, ExplorationOrder::FalseFirst, false),
    ] {
        configs.push(SearchConfig {
            strategy: Strategy::Speculative,
            depth,
            order,
            optimize,
            ..SearchConfig::default()
        });
    }
    configs
}

/// Every satisfiable query issued while exploring a corpus program yields
/// a model that, run concretely, follows the queried branch prefix letter
/// for letter.
#[test]
fn solver_models_replay_their_branch_prefixes_concretely() {
    for (name, source) in corpus_programs() {
        let ast = lang::load_program(&source).expect("corpus programs parse");
        for config in configs() {
            let mut solver =
                CapturingSolver { inner: BuiltinSolver::default(), models: Vec::new() };
            let record = explore_source(&source, &config, &mut solver).expect("exploration");
            assert_eq!(
                record.queries.len(),
                solver.models.len(),
                "{name}: every recorded query is one solver call"
            );

            let mut checked = 0;
            for (query, model) in record.queries.iter().zip(&solver.models) {
                if !query.sat {
                    assert!(model.is_none());
                    continue;
                }
                let model = model.as_ref().expect("sat queries carry models");
                let (letters, _) = run_concrete(&ast, model);
                assert!(
                    letters.starts_with(&query.sides),
                    "{name} {:?} k={} {:?}: model {model:?} of `{}` walked `{letters}`",
                    config.strategy,
                    config.depth,
                    config.order,
                    query.sides,
                );
                checked += 1;
            }
            assert!(checked > 0, "{name}: no sat queries to check");
        }
    }
}

/// The oracle itself, sanity-checked on hand-computed runs so the main
/// property cannot pass vacuously through an interpreter bug.
#[test]
fn the_concrete_oracle_follows_hand_computed_runs() {
    let source = fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/abs_sum.sx"),
    )
    .expect("program");
    let ast = lang::load_program(&source).expect("parse");

    // x = -3 < 0 (T), y = 1 >= 0 (F), |x|+|y| = 4 > 2 (T).
    let inputs: Model = [("x".to_string(), -3), ("y".to_string(), 1)].into();
    assert_eq!(run_concrete(&ast, &inputs), ("TFT".to_string(), ConcreteEnd::Completed));

    // Defaults: x = 0, y = 0, sum 0, not > 2.
    assert_eq!(run_concrete(&ast, &Model::new()), ("FFF".to_string(), ConcreteEnd::Completed));

    let divider = fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/dead_div.sx"),
    )
    .expect("program");
    let ast = lang::load_program(&divider).expect("parse");
    // a == b takes the outer true side, the inner a != b is false.
    let inputs: Model = [("a".to_string(), 2), ("b".to_string(), 2)].into();
    assert_eq!(run_concrete(&ast, &inputs), ("TF".to_string(), ConcreteEnd::Completed));
}
