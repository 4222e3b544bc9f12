//! Python bindings for the specsym engine and its path-space simulator.
//!
//! The module exposes the two layers of the workspace:
//!
//! - [`Program`] compiles source text once and explores it under any
//!   strategy configuration, returning the full exploration record as
//!   plain dictionaries and lists.
//! - [`Tree`] wraps a labeled feasibility tree — parsed from text, built
//!   full, or generated reproducibly at random — and simulates pure or
//!   speculative search over it without any solver in the loop.
//! - `predicted_calls` evaluates the closed-form invocation count for a
//!   full tree, and `replay_fixture` / `fixture_names` drive the bundled
//!   worked-example replays.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use specsym::lang;
use specsym::search::{
    explore, EndKind, ExplorationOrder, ExplorationRecord, SearchConfig, Strategy,
};
use specsym::solver::BuiltinSolver;
use specsym::symcore::{compile, CompiledProgram};
use specsym::treesim::{
    eq1_formula, gen_random_tree, parse_tree, replay_fixture as replay, simulate_pure,
    simulate_sse, LabeledTree, SimResult, FIXTURE_NAMES,
};

fn parse_strategy(name: &str) -> PyResult<Strategy> {
    match name {
        "pure" => Ok(Strategy::Pure),
        "sse" => Ok(Strategy::Speculative),
        other => Err(PyValueError::new_err(format!(
            "unknown strategy `{other}` (expected `pure` or `sse`)"
        ))),
    }
}

fn parse_order(name: &str) -> PyResult<ExplorationOrder> {
    match name {
        "false-first" => Ok(ExplorationOrder::FalseFirst),
        "true-first" => Ok(ExplorationOrder::TrueFirst),
        other => Err(PyValueError::new_err(format!(
            "unknown order `{other}` (expected `false-first` or `true-first`)"
        ))),
    }
}

fn end_kind_name(end: EndKind) -> &'static str {
    match end {
        EndKind::Normal => "normal",
        EndKind::Error => "error",
        EndKind::PrunedInfeasible => "pruned-infeasible",
    }
}

fn record_to_dict<'py>(
    py: Python<'py>,
    record: &ExplorationRecord,
) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);

    let stats = PyDict::new(py);
    stats.set_item("total", record.stats.total)?;
    stats.set_item("sat", record.stats.sat)?;
    stats.set_item("unsat", record.stats.unsat)?;
    stats.set_item("avoided", record.stats.avoided)?;
    stats.set_item("exceptions", record.stats.exceptions)?;
    dict.set_item("stats", stats)?;

    let leaves = PyList::empty(py);
    for leaf in &record.leaves {
        let entry = PyDict::new(py);
        entry.set_item("sides", &leaf.sides)?;
        entry.set_item("end", end_kind_name(leaf.end))?;
        leaves.append(entry)?;
    }
    dict.set_item("leaves", leaves)?;

    let bugs = PyList::empty(py);
    for bug in &record.bugs {
        let entry = PyDict::new(py);
        entry.set_item("message", &bug.message)?;
        entry.set_item("site", &bug.site)?;
        entry.set_item("sides", &bug.sides)?;
        entry.set_item("conjunction", &bug.conjunction)?;
        entry.set_item("witness", bug.witness.clone())?;
        bugs.append(entry)?;
    }
    dict.set_item("bugs", bugs)?;

    let queries = PyList::empty(py);
    for query in &record.queries {
        let entry = PyDict::new(py);
        entry.set_item("sides", &query.sides)?;
        entry.set_item("conjunction", &query.conjunction)?;
        entry.set_item("sat", query.sat)?;
        entry.set_item("purpose", query.purpose)?;
        queries.append(entry)?;
    }
    dict.set_item("queries", queries)?;

    let segments = PyList::empty(py);
    for segment in &record.failed_segments {
        let entry = PyDict::new(py);
        entry.set_item("m_eff", segment.m_eff)?;
        entry.set_item("probes", segment.probes)?;
        entry.set_item("first_bad", segment.first_bad)?;
        segments.append(entry)?;
    }
    dict.set_item("failed_segments", segments)?;

    dict.set_item("avoided_sides", &record.avoided_sides)?;
    dict.set_item("incidents", &record.incidents)?;
    dict.set_item("instructions", record.instructions)?;
    Ok(dict)
}

fn sim_to_dict<'py>(py: Python<'py>, result: &SimResult) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("total", result.total)?;
    dict.set_item("sat", result.sat)?;
    dict.set_item("unsat", result.unsat)?;
    dict.set_item("avoided", result.avoided)?;
    dict.set_item("trace", result.trace.clone())?;
    dict.set_item("avoided_sides", &result.avoided_sides)?;
    Ok(dict)
}

/// A compiled program, ready to be explored any number of times.
#[pyclass]
struct Program {
    ast: lang::Program,
    compiled: CompiledProgram,
}

#[pymethods]
impl Program {
    /// Compiles source text; raises `ValueError` on any language error.
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        let ast =
            lang::load_program(source).map_err(|err| PyValueError::new_err(err.to_string()))?;
        let compiled = compile(&ast);
        Ok(Program { ast, compiled })
    }

    /// Branch decisions on the longest path, counting error checks, with
    /// loops unrolled up to `loop_bound` iterations. This is the largest
    /// speculation depth that can make a difference.
    #[pyo3(signature = (loop_bound = 4))]
    fn longest_path(&self, loop_bound: u64) -> u64 {
        lang::longest_path_branch_count(&self.ast, loop_bound)
    }

    /// Explores every feasible path and returns the full record as a dict
    /// with keys `stats`, `leaves`, `bugs`, `queries`, `failed_segments`,
    /// `avoided_sides`, `incidents`, and `instructions`.
    ///
    /// Raises `ValueError` on a bad configuration and `RuntimeError` when
    /// a solver exception aborts a pure exploration.
    #[pyo3(signature = (
        strategy = "sse",
        depth = 3,
        order = "false-first",
        optimize = false,
        recheck = true,
        loop_bound = 4,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn explore<'py>(
        &self,
        py: Python<'py>,
        strategy: &str,
        depth: u32,
        order: &str,
        optimize: bool,
        recheck: bool,
        loop_bound: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        if depth < 1 {
            return Err(PyValueError::new_err("depth must be at least 1"));
        }
        let config = SearchConfig {
            strategy: parse_strategy(strategy)?,
            depth,
            order: parse_order(order)?,
            optimize,
            recheck,
            loop_bound,
            ..SearchConfig::default()
        };
        let mut solver = BuiltinSolver::default();
        let record = explore(&self.compiled, &config, &mut solver)
            .map_err(|err| PyRuntimeError::new_err(err.to_string()))?;
        record_to_dict(py, &record)
    }
}

/// A labeled feasibility tree: each side of each branch carries a bit
/// saying whether a path taking it can be satisfied.
#[pyclass]
struct Tree {
    inner: LabeledTree,
}

#[pymethods]
impl Tree {
    /// Parses the parenthesized tree notation; raises `ValueError` on a
    /// malformed or inconsistent tree.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let inner = parse_tree(text).map_err(|err| PyValueError::new_err(err.to_string()))?;
        Ok(Tree { inner })
    }

    /// A full tree of the given height with every side feasible.
    #[staticmethod]
    fn full(height: u32) -> PyResult<Self> {
        if height > 24 {
            return Err(PyValueError::new_err("height must be at most 24"));
        }
        Ok(Tree { inner: LabeledTree::full(height) })
    }

    /// A reproducible random tree: each side is drawn infeasible with
    /// probability `p`, except that both sides of a branch are never
    /// infeasible at once. Identical arguments yield the identical tree.
    #[staticmethod]
    fn random(height: u32, p: f64, seed: u64) -> PyResult<Self> {
        if height > 24 {
            return Err(PyValueError::new_err("height must be at most 24"));
        }
        if !(0.0..1.0).contains(&p) {
            return Err(PyValueError::new_err("p must be in [0, 1)"));
        }
        Ok(Tree { inner: gen_random_tree(height, p, seed) })
    }

    /// Branches on the deepest path.
    #[getter]
    fn height(&self) -> u32 {
        self.inner.height()
    }

    /// `(feasible, infeasible)` side totals over the whole tree.
    fn side_counts(&self) -> (u64, u64) {
        let counts = self.inner.side_counts();
        (counts.feasible, counts.infeasible)
    }

    /// Simulates a pure depth-first search that probes every side of
    /// every reachable branch. Returns a dict with keys `total`, `sat`,
    /// `unsat`, `avoided`, `trace`, and `avoided_sides`.
    #[pyo3(signature = (order = "false-first"))]
    fn simulate_pure<'py>(
        &self,
        py: Python<'py>,
        order: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let result = simulate_pure(&self.inner, parse_order(order)?);
        sim_to_dict(py, &result)
    }

    /// Simulates speculative search at depth `k` over this tree. Returns
    /// the same dict shape as `simulate_pure`.
    #[pyo3(signature = (k = 3, order = "false-first", optimize = false))]
    fn simulate_sse<'py>(
        &self,
        py: Python<'py>,
        k: u32,
        order: &str,
        optimize: bool,
    ) -> PyResult<Bound<'py, PyDict>> {
        if k < 1 {
            return Err(PyValueError::new_err("k must be at least 1"));
        }
        let result = simulate_sse(&self.inner, k, parse_order(order)?, optimize);
        sim_to_dict(py, &result)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        let counts = self.inner.side_counts();
        format!(
            "Tree(height={}, feasible={}, infeasible={})",
            self.inner.height(),
            counts.feasible,
            counts.infeasible
        )
    }
}

/// The closed-form number of solver invocations claimed for speculative
/// search at depth `k` over a full feasible tree of height `n`.
#[pyfunction]
fn predicted_calls(n: u32, k: u32) -> PyResult<u64> {
    if n < 1 || k < 1 {
        return Err(PyValueError::new_err("n and k must be at least 1"));
    }
    if n > 30 {
        return Err(PyValueError::new_err("n must be at most 30"));
    }
    Ok(eq1_formula(n, k))
}

/// Names of the bundled worked-example replays.
#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    FIXTURE_NAMES.to_vec()
}

/// Replays one bundled worked example and compares it probe by probe
/// against its recorded expectation. Returns a dict with keys `name`,
/// `matches`, `first_mismatch`, `result`, `expected_trace`, and
/// `expected_avoided`.
#[pyfunction]
fn replay_fixture<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyDict>> {
    let replayed = replay(name).map_err(|err| PyValueError::new_err(err.to_string()))?;
    let dict = PyDict::new(py);
    dict.set_item("name", replayed.name)?;
    dict.set_item("matches", replayed.matches)?;
    dict.set_item("first_mismatch", replayed.first_mismatch())?;
    dict.set_item("result", sim_to_dict(py, &replayed.result)?)?;
    dict.set_item("expected_trace", replayed.expected_trace)?;
    dict.set_item("expected_avoided", replayed.expected_avoided)?;
    Ok(dict)
}

#[pymodule]
fn specsym_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Program>()?;
    m.add_class::<Tree>()?;
    m.add_function(wrap_pyfunction!(predicted_calls, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(replay_fixture, m)?)?;
    Ok(())
}
