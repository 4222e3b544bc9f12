//! `run`: one exploration, one report.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use specsym::search::{
    explore, BugReport, EndKind, ExplorationOrder, ExplorationRecord, FailedSegment, Strategy,
};
use specsym::solver::SolverStats;

use super::{load_program, order_name, write_output, ExploreFlags};
use crate::{EXIT_BUGS, EXIT_OK, EXIT_SOLVER};

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Program to explore (`.sx`).
    pub program: PathBuf,
    #[command(flatten)]
    pub flags: ExploreFlags,
    /// Write the full report as JSON here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Echoed into the report (exploration itself is deterministic).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// A previous report to compute savings against.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
}

/// The configuration a report was produced under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub program: String,
    pub strategy: Strategy,
    pub depth: u32,
    pub order: ExplorationOrder,
    pub optimize: bool,
    pub recheck: bool,
    pub loop_bound: u64,
    pub solver: String,
    pub seed: u64,
}

/// Leaves of the explored path tree, bucketed by how they ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafCounts {
    pub total: usize,
    pub normal: usize,
    pub error: usize,
    pub pruned: usize,
}

/// Relative cost of this run against a named baseline report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Savings {
    /// Path of the baseline report.
    pub baseline: String,
    /// Solver invocations saved, in percent of the baseline's.
    pub calls_saved_pct: f64,
    /// Wall time saved, in percent (noisy; never asserted anywhere).
    pub time_saved_pct: f64,
    /// Instructions executed beyond the baseline's (speculation overshoot).
    pub extra_instructions: i64,
    pub extra_instructions_pct: f64,
}

/// Everything `run` reports. Serializes with a fixed field order; two runs
/// of the same configuration differ only in the `*_time_ms` fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub leaves: LeafCounts,
    pub bugs: Vec<BugReport>,
    pub stats: SolverStats,
    pub failed_segments: Vec<FailedSegment>,
    pub avoided_sides: Vec<String>,
    pub incidents: Vec<String>,
    pub instructions: u64,
    pub wall_time_ms: f64,
    pub solving_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub savings: Option<Savings>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

fn leaf_counts(rec: &ExplorationRecord) -> LeafCounts {
    let bucket = |end: EndKind| rec.leaves.iter().filter(|l| l.end == end).count();
    LeafCounts {
        total: rec.leaves.len(),
        normal: bucket(EndKind::Normal),
        error: bucket(EndKind::Error),
        pruned: bucket(EndKind::PrunedInfeasible),
    }
}

/// The baseline fields savings are computed from.
struct BaselineFigures {
    path: String,
    total: u64,
    instructions: u64,
    wall_time_ms: f64,
}

fn read_baseline(path: &PathBuf) -> Result<BaselineFigures> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading baseline report `{}`", path.display()))?;
    let report: RunReport = serde_json::from_str(&text)
        .with_context(|| format!("parsing baseline report `{}`", path.display()))?;
    Ok(BaselineFigures {
        path: path.display().to_string(),
        total: report.stats.total,
        instructions: report.instructions,
        wall_time_ms: report.wall_time_ms,
    })
}

fn percent_saved(now: f64, base: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        (1.0 - now / base) * 100.0
    }
}

fn savings(rec: &ExplorationRecord, wall_time_ms: f64, base: &BaselineFigures) -> Savings {
    let extra = rec.instructions as i64 - base.instructions as i64;
    Savings {
        baseline: base.path.clone(),
        calls_saved_pct: percent_saved(rec.stats.total as f64, base.total as f64),
        time_saved_pct: percent_saved(wall_time_ms, base.wall_time_ms),
        extra_instructions: extra,
        extra_instructions_pct: if base.instructions == 0 {
            0.0
        } else {
            extra as f64 * 100.0 / base.instructions as f64
        },
    }
}

pub fn execute(args: RunArgs) -> Result<i32> {
    let config = args.flags.config()?;
    let program = load_program(&args.program, config.loop_bound)?;
    let baseline = args.baseline.as_ref().map(read_baseline).transpose()?;

    let mut solver = args.flags.solver.build();
    let started = Instant::now();
    let rec = match explore(&program.compiled, &config, solver.as_mut()) {
        Ok(rec) => rec,
        Err(failure) => {
            eprintln!("error: {failure:#}");
            return Ok(EXIT_SOLVER);
        }
    };
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;

    let report = RunReport {
        config: ConfigEcho {
            program: args.program.display().to_string(),
            strategy: config.strategy,
            depth: config.depth,
            order: config.order,
            optimize: config.optimize,
            recheck: config.recheck,
            loop_bound: config.loop_bound,
            solver: args.flags.solver.to_string(),
            seed: args.seed,
        },
        leaves: leaf_counts(&rec),
        bugs: rec.bugs.clone(),
        stats: rec.stats.clone(),
        failed_segments: rec.failed_segments.clone(),
        avoided_sides: rec.avoided_sides.clone(),
        incidents: rec.incidents.clone(),
        instructions: rec.instructions,
        wall_time_ms,
        solving_time_ms: rec.stats.solving_time.as_secs_f64() * 1e3,
        savings: baseline.map(|b| savings(&rec, wall_time_ms, &b)),
    };

    if let Some(path) = &args.json {
        write_output(path, &report.to_json())?;
    }
    print_summary(&report);

    Ok(if rec.stats.exceptions > 0 {
        EXIT_SOLVER
    } else if report.bugs.is_empty() {
        EXIT_OK
    } else {
        EXIT_BUGS
    })
}

fn print_summary(report: &RunReport) {
    let c = &report.config;
    let strategy = match c.strategy {
        Strategy::Pure => "pure".to_string(),
        Strategy::Speculative => format!("sse depth {}", c.depth),
    };
    println!("program: {}", c.program);
    println!(
        "strategy: {} ({}, optimize {}, recheck {})",
        strategy,
        order_name(c.order),
        on_off(c.optimize),
        on_off(c.recheck),
    );
    let l = report.leaves;
    println!(
        "leaves: {} ({} normal, {} error, {} pruned infeasible)",
        l.total, l.normal, l.error, l.pruned
    );
    let s = &report.stats;
    println!(
        "solver ({}): {} calls ({} sat, {} unsat), {} avoided, {} exceptions",
        c.solver, s.total, s.sat, s.unsat, s.avoided, s.exceptions
    );
    println!(
        "instructions: {}; wall {:.2} ms (solving {:.2} ms)",
        report.instructions, report.wall_time_ms, report.solving_time_ms
    );
    for incident in &report.incidents {
        println!("incident: {incident}");
    }
    for bug in &report.bugs {
        println!("bug: {}", render_bug(bug));
    }
    if let Some(sv) = &report.savings {
        println!(
            "vs baseline {}: {:.1}% calls saved, {:.1}% time saved, {} extra instructions ({:.1}%)",
            sv.baseline,
            sv.calls_saved_pct,
            sv.time_saved_pct,
            sv.extra_instructions,
            sv.extra_instructions_pct
        );
    }
}

fn on_off(flag: bool) -> &'static str {
    if flag {
        "on"
    } else {
        "off"
    }
}

pub(crate) fn render_bug(bug: &BugReport) -> String {
    let witness = match &bug.witness {
        Some(model) if model.is_empty() => "witness: any input".to_string(),
        Some(model) => {
            let pairs: Vec<String> = model.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("witness {}", pairs.join(", "))
        }
        None => "unconfirmed (reported under speculation)".to_string(),
    };
    format!("{} at {} on path `{}` — {}", bug.message, bug.site, bug.sides, witness)
}
