use super::*;
use crate::solver::{BuiltinSolver, SolverVerdict};

/// Three independent feasible branches: the full path tree of height 3.
const THREE_GATES: &str = "\
sym int x; sym int y; sym int z;
n = 0;
if (x > 0) { n = n + 1; }
if (y > 0) { n = n + 1; }
if (z > 0) { n = n + 1; }
print(n);
";

/// Same shape, but the third branch's false side (`100*x <= z`) is
/// infeasible whenever the first branch took its true side (`x >= 1`
/// forces `100*x` past the solver's domain ceiling for `z`).
const GATED_THIRD: &str = "\
sym int x; sym int y; sym int z;
if (x > 0) { a = 1; } else { a = 0; }
if (y > 0) { b = 1; } else { b = 0; }
if (100 * x > z) { c = 1; } else { c = 0; }
print(a + b + c);
";

/// The division only runs under `c != d`, so its error side is dead.
const DEAD_DIV: &str = "\
sym int a; sym int c; sym int d;
if (c != d) {
    x = a / (c - d);
    print(x);
} else {
    print(0);
}
";

/// A reachable explicit error statement.
const GUARDED_ERROR: &str = "\
sym int x;
if (x > 5) {
    error(\"boom\");
}
print(0);
";

/// An error statement behind contradictory guards.
const UNREACHABLE_ERROR: &str = "\
sym int x;
if (x > 5) {
    if (x < 3) {
        error(\"never\");
    }
}
print(0);
";

/// An assertion with a feasible violation at x = 7.
const BAD_ASSERT: &str = "\
sym int x;
assert(x != 7);
print(x);
";

/// An assertion that holds on both paths of the preceding branch.
const ABS_ASSERT: &str = "\
sym int x;
if (x > 0) { y = x; } else { y = 0 - x; }
assert(y >= 0);
print(y);
";

/// A division whose divisor is an unconstrained input.
const RAW_DIV: &str = "\
sym int a; sym int b;
q = a / b;
print(q);
";

/// A counting loop driven by a symbolic bound.
const COUNT_LOOP: &str = "\
sym int n;
i = 0;
while (i < n) {
    i = i + 1;
}
print(i);
";

fn sse_config(depth: u32, order: ExplorationOrder, optimize: bool) -> SearchConfig {
    SearchConfig {
        strategy: Strategy::Speculative,
        depth,
        order,
        optimize,
        ..SearchConfig::default()
    }
}

fn pure_config(order: ExplorationOrder, optimize: bool) -> SearchConfig {
    SearchConfig { strategy: Strategy::Pure, order, optimize, ..SearchConfig::default() }
}

fn run(source: &str, config: &SearchConfig) -> ExplorationRecord {
    let mut solver = BuiltinSolver::default();
    explore_source(source, config, &mut solver).expect("exploration should succeed")
}

fn query_trace(rec: &ExplorationRecord) -> Vec<(&str, bool)> {
    rec.queries.iter().map(|q| (q.sides.as_str(), q.sat)).collect()
}

fn leaf_trace(rec: &ExplorationRecord) -> Vec<(&str, EndKind)> {
    rec.leaves.iter().map(|l| (l.sides.as_str(), l.end)).collect()
}

use ExplorationOrder::{FalseFirst, TrueFirst};

#[test]
fn pure_queries_both_sides_of_every_feasible_branch() {
    let rec = run(THREE_GATES, &pure_config(FalseFirst, true));
    let expected = [
        ("F", true),
        ("FF", true),
        ("FFF", true),
        ("FFT", true),
        ("FT", true),
        ("FTF", true),
        ("FTT", true),
        ("T", true),
        ("TF", true),
        ("TFF", true),
        ("TFT", true),
        ("TT", true),
        ("TTF", true),
        ("TTT", true),
    ];
    assert_eq!(query_trace(&rec), expected);
    assert_eq!(rec.stats.total, 14);
    assert_eq!(rec.stats.sat, 14);
    assert_eq!(rec.leaves.len(), 8);
    assert!(rec.leaves.iter().all(|l| l.end == EndKind::Normal));
    assert!(rec.bugs.is_empty());
    assert!(rec.queries.iter().all(|q| q.purpose == "branch"));
}

#[test]
fn speculation_covering_whole_paths_queries_once_per_leaf() {
    let rec = run(THREE_GATES, &sse_config(3, FalseFirst, true));
    let expected = [
        ("FFF", true),
        ("FFT", true),
        ("FTF", true),
        ("FTT", true),
        ("TFF", true),
        ("TFT", true),
        ("TTF", true),
        ("TTT", true),
    ];
    assert_eq!(query_trace(&rec), expected);
    let purposes: Vec<&str> = rec.queries.iter().map(|q| q.purpose).collect();
    assert_eq!(
        purposes,
        [
            "boundary", "path-end", "path-end", "path-end", "boundary", "path-end",
            "path-end", "path-end"
        ]
    );
    assert_eq!(rec.leaves.len(), 8);
    assert!(rec.failed_segments.is_empty());
}

#[test]
fn speculation_depth_two_alternates_boundary_and_path_end_solves() {
    let rec = run(THREE_GATES, &sse_config(2, FalseFirst, true));
    let expected = [
        ("FF", true),
        ("FFF", true),
        ("FFT", true),
        ("FTF", true),
        ("FTT", true),
        ("TF", true),
        ("TFF", true),
        ("TFT", true),
        ("TTF", true),
        ("TTT", true),
    ];
    assert_eq!(query_trace(&rec), expected);
    assert_eq!(rec.leaves.len(), 8);
}

#[test]
fn speculation_deeper_than_the_tree_solves_at_path_ends_only() {
    let rec = run(THREE_GATES, &sse_config(8, FalseFirst, true));
    assert_eq!(rec.stats.total, 8);
    assert!(rec.queries.iter().all(|q| q.purpose == "path-end"));
    assert_eq!(rec.leaves.len(), 8);
}

#[test]
fn failed_batch_is_localized_by_bisecting_prefixes() {
    let rec = run(GATED_THIRD, &sse_config(3, FalseFirst, false));
    let expected = [
        ("FFF", true),
        ("FFT", true),
        ("FTF", true),
        ("FTT", true),
        ("TFF", false),
        ("T", true),
        ("TF", true),
        ("TFT", true),
        ("TTF", false),
        ("TT", true),
        ("TTT", true),
    ];
    assert_eq!(query_trace(&rec), expected);
    assert_eq!(
        rec.failed_segments,
        [
            FailedSegment { m_eff: 3, probes: 2, first_bad: 3 },
            FailedSegment { m_eff: 2, probes: 1, first_bad: 3 },
        ]
    );
    assert_eq!(
        leaf_trace(&rec),
        [
            ("FFF", EndKind::Normal),
            ("FFT", EndKind::Normal),
            ("FTF", EndKind::Normal),
            ("FTT", EndKind::Normal),
            ("TFF", EndKind::PrunedInfeasible),
            ("TFT", EndKind::Normal),
            ("TTF", EndKind::PrunedInfeasible),
            ("TTT", EndKind::Normal),
        ]
    );
    assert_eq!(rec.stats.avoided, 0);
}

#[test]
fn true_first_order_reaches_failures_at_path_ends() {
    let rec = run(GATED_THIRD, &sse_config(3, TrueFirst, true));
    let expected = [
        ("TTT", true),
        ("TTF", false),
        ("TFT", true),
        ("TFF", false),
        ("FTT", true),
        ("FTF", true),
        ("FFT", true),
        ("FFF", true),
    ];
    assert_eq!(query_trace(&rec), expected);
    // Both failures localize instantly: the prefix above them was already
    // confirmed, leaving exactly one candidate.
    assert_eq!(
        rec.failed_segments,
        [
            FailedSegment { m_eff: 1, probes: 0, first_bad: 3 },
            FailedSegment { m_eff: 1, probes: 0, first_bad: 3 },
        ]
    );
    assert_eq!(rec.stats.avoided, 0);
}

#[test]
fn localized_infeasibility_entails_the_sibling_side() {
    let rec = run(GATED_THIRD, &sse_config(3, FalseFirst, true));
    let expected = [
        ("FFF", true),
        ("FFT", true),
        ("FTF", true),
        ("FTT", true),
        ("TFF", false),
        ("T", true),
        ("TF", true),
        ("TTF", false),
        ("TT", true),
    ];
    assert_eq!(query_trace(&rec), expected);
    assert_eq!(rec.avoided_sides, ["TFT", "TTT"]);
    assert_eq!(rec.stats.avoided, 2);
    assert_eq!(
        leaf_trace(&rec),
        [
            ("FFF", EndKind::Normal),
            ("FFT", EndKind::Normal),
            ("FTF", EndKind::Normal),
            ("FTT", EndKind::Normal),
            ("TFF", EndKind::PrunedInfeasible),
            ("TFT", EndKind::Normal),
            ("TTF", EndKind::PrunedInfeasible),
            ("TTT", EndKind::Normal),
        ]
    );
}

#[test]
fn depth_one_speculation_behaves_exactly_like_pure_search() {
    let programs = [
        THREE_GATES,
        GATED_THIRD,
        DEAD_DIV,
        GUARDED_ERROR,
        UNREACHABLE_ERROR,
        BAD_ASSERT,
        ABS_ASSERT,
        RAW_DIV,
        COUNT_LOOP,
    ];
    for source in programs {
        for order in [FalseFirst, TrueFirst] {
            for optimize in [false, true] {
                let pure = run(source, &pure_config(order, optimize));
                let sse = run(source, &sse_config(1, order, optimize));
                assert_eq!(query_trace(&pure), query_trace(&sse), "queries: {source}");
                assert_eq!(leaf_trace(&pure), leaf_trace(&sse), "leaves: {source}");
                assert_eq!(pure.bugs, sse.bugs, "bugs: {source}");
                assert_eq!(pure.avoided_sides, sse.avoided_sides, "avoided: {source}");
                assert_eq!(pure.stats.total, sse.stats.total);
                assert_eq!(pure.stats.sat, sse.stats.sat);
                assert_eq!(pure.stats.unsat, sse.stats.unsat);
                assert_eq!(pure.stats.tallies, sse.stats.tallies);
            }
        }
    }
}

#[test]
fn dead_error_side_is_pruned_and_its_continuation_avoided() {
    let rec = run(DEAD_DIV, &sse_config(3, FalseFirst, true));
    assert_eq!(query_trace(&rec), [("F", true), ("TF", false), ("T", true)]);
    assert_eq!(
        rec.failed_segments,
        [FailedSegment { m_eff: 2, probes: 1, first_bad: 2 }]
    );
    assert_eq!(
        leaf_trace(&rec),
        [
            ("F", EndKind::Normal),
            ("TF", EndKind::PrunedInfeasible),
            ("TT", EndKind::Normal),
        ]
    );
    assert_eq!(rec.avoided_sides, ["TT"]);
    assert!(rec.bugs.is_empty());
}

#[test]
fn without_recheck_a_speculative_error_report_is_unconfirmed() {
    for depth in [2, 3] {
        let config = SearchConfig { recheck: false, ..sse_config(depth, FalseFirst, true) };
        let rec = run(DEAD_DIV, &config);
        assert_eq!(rec.bugs.len(), 1, "depth {depth}");
        let bug = &rec.bugs[0];
        assert_eq!(bug.site, "div#0");
        assert_eq!(bug.sides, "TF");
        assert!(bug.witness.is_none(), "unconfirmed report must carry no witness");
        assert_eq!(
            leaf_trace(&rec),
            [
                ("F", EndKind::Normal),
                ("TF", EndKind::Error),
                ("TT", EndKind::Normal),
            ]
        );
    }
}

#[test]
fn recheck_flag_is_moot_when_nothing_is_speculated() {
    // At depth 1 every decision is confirmed on arrival, so the site is
    // decided normally and the dead error side is pruned, not reported.
    let sse = SearchConfig { recheck: false, ..sse_config(1, FalseFirst, true) };
    let rec = run(DEAD_DIV, &sse);
    assert!(rec.bugs.is_empty());
    let pure = SearchConfig { recheck: false, ..pure_config(FalseFirst, true) };
    let rec = run(DEAD_DIV, &pure);
    assert!(rec.bugs.is_empty());
    assert_eq!(
        leaf_trace(&rec),
        [
            ("F", EndKind::Normal),
            ("TF", EndKind::PrunedInfeasible),
            ("TT", EndKind::Normal),
        ]
    );
}

#[test]
fn reachable_error_statement_is_reported_with_a_witness() {
    let rec = run(GUARDED_ERROR, &sse_config(3, FalseFirst, true));
    assert_eq!(query_trace(&rec), [("F", true), ("T", true)]);
    assert_eq!(rec.bugs.len(), 1);
    let bug = &rec.bugs[0];
    assert_eq!(bug.message, "boom");
    assert_eq!(bug.site, "error#0");
    assert_eq!(bug.sides, "T");
    let witness = bug.witness.as_ref().expect("confirmed report carries a witness");
    assert!(*witness.get("x").unwrap() > 5);
    assert_eq!(
        leaf_trace(&rec),
        [("F", EndKind::Normal), ("T", EndKind::Error)]
    );
}

#[test]
fn unreachable_error_statement_is_pruned_not_reported() {
    let rec = run(UNREACHABLE_ERROR, &sse_config(3, FalseFirst, true));
    assert!(rec.bugs.is_empty());
    assert_eq!(
        leaf_trace(&rec),
        [
            ("F", EndKind::Normal),
            ("TF", EndKind::Normal),
            ("TT", EndKind::PrunedInfeasible),
        ]
    );
}

#[test]
fn assertion_violation_yields_the_exact_counterexample() {
    let rec = run(BAD_ASSERT, &sse_config(3, FalseFirst, true));
    assert_eq!(rec.bugs.len(), 1);
    let bug = &rec.bugs[0];
    assert_eq!(bug.site, "assert#0");
    assert_eq!(bug.sides, "F");
    assert_eq!(bug.witness.as_ref().unwrap().get("x"), Some(&7));
    assert_eq!(
        leaf_trace(&rec),
        [("F", EndKind::Error), ("T", EndKind::Normal)]
    );
}

#[test]
fn assertion_that_holds_prunes_its_error_side_on_every_path() {
    let rec = run(ABS_ASSERT, &sse_config(3, FalseFirst, true));
    assert!(rec.bugs.is_empty());
    assert_eq!(
        query_trace(&rec),
        [("FF", false), ("F", true), ("TF", false), ("T", true)]
    );
    assert_eq!(rec.avoided_sides, ["FT", "TT"]);
    assert_eq!(
        leaf_trace(&rec),
        [
            ("FF", EndKind::PrunedInfeasible),
            ("FT", EndKind::Normal),
            ("TF", EndKind::PrunedInfeasible),
            ("TT", EndKind::Normal),
        ]
    );
}

#[test]
fn unconstrained_divisor_reports_division_by_zero() {
    let rec = run(RAW_DIV, &sse_config(3, FalseFirst, true));
    assert_eq!(rec.bugs.len(), 1);
    let bug = &rec.bugs[0];
    assert_eq!(bug.site, "div#0");
    assert_eq!(bug.witness.as_ref().unwrap().get("b"), Some(&0));
    assert_eq!(
        leaf_trace(&rec),
        [("F", EndKind::Error), ("T", EndKind::Normal)]
    );
}

#[test]
fn concrete_division_by_zero_needs_no_solver_at_all() {
    let rec = run("x = 4 / 0; print(x);", &sse_config(3, FalseFirst, true));
    assert_eq!(rec.stats.total, 0);
    assert_eq!(rec.bugs.len(), 1);
    assert_eq!(rec.bugs[0].site, "div#0");
    assert!(rec.bugs[0].witness.is_some(), "the empty path is trivially reachable");
}

#[test]
fn loop_paths_are_cut_at_the_iteration_bound() {
    let rec = run(COUNT_LOOP, &sse_config(3, FalseFirst, true));
    assert_eq!(
        leaf_trace(&rec),
        [
            ("F", EndKind::Normal),
            ("TF", EndKind::Normal),
            ("TTF", EndKind::Normal),
            ("TTTF", EndKind::Normal),
            ("TTTT", EndKind::Normal),
        ]
    );
    assert!(rec.bugs.is_empty());
}

/// Forwards to the builtin solver but raises on chosen call numbers.
struct FlakySolver {
    inner: BuiltinSolver,
    calls: usize,
    fail_on: Vec<usize>,
}

impl FlakySolver {
    fn new(fail_on: Vec<usize>) -> FlakySolver {
        FlakySolver { inner: BuiltinSolver::default(), calls: 0, fail_on }
    }
}

impl Solver for FlakySolver {
    fn solve(&mut self, constraints: &[Constraint]) -> Result<SolverVerdict, SolverException> {
        self.calls += 1;
        if self.fail_on.contains(&self.calls) {
            return Err(SolverException::Capacity("injected failure".into()));
        }
        self.inner.solve(constraints)
    }

    fn name(&self) -> &'static str {
        "flaky"
    }
}

#[test]
fn a_raising_solver_cuts_one_side_and_exploration_continues() {
    let program = crate::symcore::compile(&crate::lang::load_program(GATED_THIRD).unwrap());
    let mut solver = FlakySolver::new(vec![5]);
    let rec = explore(&program, &sse_config(3, FalseFirst, true), &mut solver)
        .expect("speculative exploration survives solver exceptions");
    // The fifth call is the batched solve of TFF; the forward scan then
    // salvages T and TF before abandoning the undecidable side.
    let expected = [
        ("FFF", true),
        ("FFT", true),
        ("FTF", true),
        ("FTT", true),
        ("T", true),
        ("TF", true),
        ("TFT", true),
        ("TTF", false),
        ("TT", true),
    ];
    assert_eq!(query_trace(&rec), expected);
    assert_eq!(rec.stats.exceptions, 1);
    assert_eq!(rec.incidents.len(), 2);
    assert!(rec.incidents[0].contains("TFF"));
    assert!(rec.incidents[1].contains("abandoned"));
    // TFF itself is neither explored nor pruned: it simply has no leaf.
    assert_eq!(
        leaf_trace(&rec),
        [
            ("FFF", EndKind::Normal),
            ("FFT", EndKind::Normal),
            ("FTF", EndKind::Normal),
            ("FTT", EndKind::Normal),
            ("TFT", EndKind::Normal),
            ("TTF", EndKind::PrunedInfeasible),
            ("TTT", EndKind::Normal),
        ]
    );
    assert_eq!(rec.avoided_sides, ["TTT"]);
}

#[test]
fn pure_search_aborts_on_the_first_solver_exception() {
    let program = crate::symcore::compile(&crate::lang::load_program(THREE_GATES).unwrap());
    let mut solver = FlakySolver::new(vec![1]);
    let err = explore(&program, &pure_config(FalseFirst, true), &mut solver)
        .expect_err("pure search cannot continue past an undecided side");
    assert_eq!(err.sides, "F");
    assert!(matches!(err.error, SolverException::Capacity(_)));
}

#[test]
fn every_query_pairs_one_side_letter_with_one_conjunct() {
    for source in [GATED_THIRD, DEAD_DIV, ABS_ASSERT, COUNT_LOOP] {
        for depth in [1, 2, 3, 5] {
            let rec = run(source, &sse_config(depth, FalseFirst, true));
            assert!(!rec.queries.is_empty());
            for q in &rec.queries {
                assert_eq!(q.sides.len(), q.conjunction.len(), "{source} depth {depth}");
            }
        }
    }
}

#[test]
fn exploration_is_deterministic() {
    for config in [
        sse_config(3, FalseFirst, true),
        sse_config(2, TrueFirst, false),
        pure_config(FalseFirst, true),
    ] {
        let a = run(GATED_THIRD, &config);
        let b = run(GATED_THIRD, &config);
        assert_eq!(query_trace(&a), query_trace(&b));
        assert_eq!(leaf_trace(&a), leaf_trace(&b));
        assert_eq!(a.bugs, b.bugs);
        assert_eq!(a.instructions, b.instructions);
    }
}
