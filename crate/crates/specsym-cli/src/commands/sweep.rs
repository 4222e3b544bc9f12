//! `sweep`: invocation counts across speculation depths, as a table
//! against the pure baseline.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use specsym::search::{explore, ExplorationOrder, ExplorationRecord, SearchConfig, Strategy};

use super::{load_program, order_name, usage, write_output, LoadedProgram, SolverChoice};
use crate::{EXIT_OK, EXIT_SOLVER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrdersArg {
    Both,
    FalseFirst,
    TrueFirst,
}

impl OrdersArg {
    fn orders(self) -> Vec<ExplorationOrder> {
        match self {
            OrdersArg::Both => vec![ExplorationOrder::FalseFirst, ExplorationOrder::TrueFirst],
            OrdersArg::FalseFirst => vec![ExplorationOrder::FalseFirst],
            OrdersArg::TrueFirst => vec![ExplorationOrder::TrueFirst],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizeArg {
    Both,
    On,
    Off,
}

impl OptimizeArg {
    fn variants(self) -> Vec<bool> {
        match self {
            OptimizeArg::Both => vec![false, true],
            OptimizeArg::On => vec![true],
            OptimizeArg::Off => vec![false],
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Program to sweep (`.sx`).
    pub program: PathBuf,
    /// Smallest speculation depth.
    #[arg(long, default_value_t = 1)]
    pub min_depth: u32,
    /// Largest speculation depth; defaults to the longest path's branch
    /// count.
    #[arg(long)]
    pub max_depth: Option<u32>,
    /// Exploration orders to include.
    #[arg(long, value_enum, default_value = "both")]
    pub orders: OrdersArg,
    /// Optimization variants to include.
    #[arg(long, value_enum, default_value = "both")]
    pub optimize: OptimizeArg,
    /// Iterations after which a loop's test silently ends the path.
    #[arg(long, default_value_t = 4)]
    pub loop_bound: u64,
    /// Decision procedure: `builtin` or `external:<command>`.
    #[arg(long, default_value = "builtin")]
    pub solver: SolverChoice,
    /// Write the table as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the rows as JSON here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// One sweep measurement: a speculative exploration at depth `k`, next to
/// the pure baseline with the same order and optimization setting.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub program: String,
    pub k: u32,
    pub order: ExplorationOrder,
    pub optimize: bool,
    pub total: u64,
    pub sat: u64,
    pub unsat: u64,
    pub avoided: u64,
    pub exceptions: u64,
    pub leaves: usize,
    pub bugs: usize,
    pub instructions: u64,
    pub pure_total: u64,
    /// Speculative calls as a percentage of pure calls.
    pub pct: f64,
}

const CSV_HEADER: &str =
    "program,k,order,optimize,total,sat,unsat,avoided,exceptions,leaves,bugs,instructions,pure_total,pct";

impl SweepRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{:.1}",
            self.program,
            self.k,
            order_name(self.order),
            self.optimize,
            self.total,
            self.sat,
            self.unsat,
            self.avoided,
            self.exceptions,
            self.leaves,
            self.bugs,
            self.instructions,
            self.pure_total,
            self.pct
        )
    }
}

struct Cell {
    order: ExplorationOrder,
    optimize: bool,
    k: u32,
}

fn explore_cell(
    program: &LoadedProgram,
    solver_choice: &SolverChoice,
    config: &SearchConfig,
) -> Result<ExplorationRecord> {
    let mut solver = solver_choice.build();
    explore(&program.compiled, config, solver.as_mut()).map_err(Into::into)
}

pub fn execute(args: SweepArgs) -> Result<i32> {
    let program = load_program(&args.program, args.loop_bound)?;
    if program.longest_path == 0 {
        return Err(usage(format!(
            "`{}` has no branch decisions to sweep over",
            args.program.display()
        )));
    }
    let rows = match compute_rows(&args, &program) {
        Ok(rows) => rows,
        Err(e) if e.downcast_ref::<specsym::search::SolverFailure>().is_some() => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_SOLVER);
        }
        Err(e) => return Err(e),
    };

    if let Some(path) = &args.csv {
        let mut text = String::from(CSV_HEADER);
        text.push('\n');
        for row in &rows {
            text.push_str(&row.csv_line());
            text.push('\n');
        }
        write_output(path, &text)?;
    }
    if let Some(path) = &args.json {
        let mut text = serde_json::to_string_pretty(&rows)?;
        text.push('\n');
        write_output(path, &text)?;
    }
    print_table(&rows);

    Ok(if rows.iter().any(|r| r.exceptions > 0) {
        EXIT_SOLVER
    } else {
        EXIT_OK
    })
}

fn compute_rows(args: &SweepArgs, program: &LoadedProgram) -> Result<Vec<SweepRow>> {
    let max_depth = args.max_depth.unwrap_or(program.longest_path.min(64) as u32);
    if args.min_depth < 1 {
        return Err(usage("--min-depth must be at least 1"));
    }
    if u64::from(max_depth) > program.longest_path {
        return Err(usage(format!(
            "--max-depth {} exceeds the longest path's {} branch decisions",
            max_depth, program.longest_path
        )));
    }
    if args.min_depth > max_depth {
        return Err(usage(format!(
            "empty depth range: --min-depth {} > --max-depth {max_depth}",
            args.min_depth
        )));
    }

    // A pure baseline per (order, optimize) variant, then one speculative
    // cell per depth within each variant. Cells are independent searches,
    // so they run in parallel; the table keeps construction order.
    let mut baselines = Vec::new();
    for order in args.orders.orders() {
        for optimize in args.optimize.variants() {
            let config = SearchConfig {
                strategy: Strategy::Pure,
                depth: 1,
                order,
                optimize,
                loop_bound: args.loop_bound,
                ..SearchConfig::default()
            };
            let rec = explore_cell(program, &args.solver, &config)?;
            baselines.push((order, optimize, rec.stats.total));
        }
    }
    let cells: Vec<Cell> = baselines
        .iter()
        .flat_map(|&(order, optimize, _)| {
            (args.min_depth..=max_depth).map(move |k| Cell { order, optimize, k })
        })
        .collect();
    let program_name = args.program.display().to_string();
    let rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|cell| {
            let config = SearchConfig {
                strategy: Strategy::Speculative,
                depth: cell.k,
                order: cell.order,
                optimize: cell.optimize,
                loop_bound: args.loop_bound,
                ..SearchConfig::default()
            };
            let rec = explore_cell(program, &args.solver, &config)?;
            let pure_total = baselines
                .iter()
                .find(|&&(o, opt, _)| o == cell.order && opt == cell.optimize)
                .expect("every cell has a baseline")
                .2;
            Ok(SweepRow {
                program: program_name.clone(),
                k: cell.k,
                order: cell.order,
                optimize: cell.optimize,
                total: rec.stats.total,
                sat: rec.stats.sat,
                unsat: rec.stats.unsat,
                avoided: rec.stats.avoided,
                exceptions: rec.stats.exceptions,
                leaves: rec.leaves.len(),
                bugs: rec.bugs.len(),
                instructions: rec.instructions,
                pure_total,
                pct: if pure_total == 0 {
                    100.0
                } else {
                    rec.stats.total as f64 * 100.0 / pure_total as f64
                },
            })
        })
        .collect::<Result<_>>()?;
    Ok(rows)
}

fn print_table(rows: &[SweepRow]) {
    println!(
        "{:>3}  {:<11}  {:<8}  {:>6}  {:>5}  {:>5}  {:>7}  {:>6}  {:>4}  {:>10}  {:>6}",
        "k", "order", "optimize", "total", "sat", "unsat", "avoided", "leaves", "bugs", "pure_total", "pct"
    );
    for r in rows {
        let mut line = String::new();
        let _ = write!(
            line,
            "{:>3}  {:<11}  {:<8}  {:>6}  {:>5}  {:>5}  {:>7}  {:>6}  {:>4}  {:>10}  {:>5.1}%",
            r.k,
            order_name(r.order),
            if r.optimize { "on" } else { "off" },
            r.total,
            r.sat,
            r.unsat,
            r.avoided,
            r.leaves,
            r.bugs,
            r.pure_total,
            r.pct
        );
        println!("{line}");
    }
}
