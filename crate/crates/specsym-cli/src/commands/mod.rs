//! Subcommand definitions and the plumbing they share.

pub mod compare;
pub mod run;
pub mod shim;
pub mod sweep;
pub mod treesim;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use specsym::lang;
use specsym::search::{ExplorationOrder, SearchConfig, Strategy};
use specsym::solver::{BuiltinSolver, ExternalSolver, Solver};
use specsym::symcore::{compile, CompiledProgram};

/// A user mistake in flag values (as opposed to a failing operation);
/// mapped to the usage exit code.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for UsageError {}

pub(crate) fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Parser)]
#[command(
    name = "specsym",
    version,
    about = "Symbolic path exploration with speculative batched solving",
    subcommand_required = true,
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Explore one program under one configuration and report statistics.
    Run(run::RunArgs),
    /// Explore a program across a range of speculation depths and tabulate
    /// invocation counts against the pure baseline.
    Sweep(sweep::SweepArgs),
    /// Check that speculative exploration visits the same path tree as the
    /// pure strategy, across depths, orders, and optimization settings.
    Compare(compare::CompareArgs),
    /// Abstract path-space simulation: replay pinned fixtures, measure
    /// random labeled trees, or check the closed-form count prediction.
    #[command(subcommand)]
    Treesim(treesim::TreesimCmd),
    /// Act as an SMT-LIB solver process over stdin/stdout (a stand-in for
    /// an external solver binary, used to exercise the external client).
    SmtShim(shim::ShimArgs),
}

impl Cli {
    pub fn execute(self) -> Result<i32> {
        match self.command {
            Command::Run(args) => run::execute(args),
            Command::Sweep(args) => sweep::execute(args),
            Command::Compare(args) => compare::execute(args),
            Command::Treesim(cmd) => treesim::execute(cmd),
            Command::SmtShim(args) => shim::execute(args),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Pure,
    Sse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    FalseFirst,
    TrueFirst,
}

impl OrderArg {
    pub fn to_order(self) -> ExplorationOrder {
        match self {
            OrderArg::FalseFirst => ExplorationOrder::FalseFirst,
            OrderArg::TrueFirst => ExplorationOrder::TrueFirst,
        }
    }
}

pub(crate) fn order_name(order: ExplorationOrder) -> &'static str {
    match order {
        ExplorationOrder::FalseFirst => "false-first",
        ExplorationOrder::TrueFirst => "true-first",
    }
}

/// Which decision procedure to query: the built-in one, or an external
/// SMT-LIB process given as `external:<command ...>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverChoice {
    Builtin,
    External { command: String, args: Vec<String> },
}

impl FromStr for SolverChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<SolverChoice, String> {
        if s == "builtin" {
            return Ok(SolverChoice::Builtin);
        }
        if let Some(rest) = s.strip_prefix("external:") {
            let mut words = rest.split_whitespace().map(str::to_string);
            let command = words
                .next()
                .ok_or_else(|| "external solver needs a command, e.g. external:z3".to_string())?;
            return Ok(SolverChoice::External { command, args: words.collect() });
        }
        Err(format!("expected `builtin` or `external:<command>`, got `{s}`"))
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverChoice::Builtin => f.write_str("builtin"),
            SolverChoice::External { command, args } => {
                write!(f, "external:{command}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                Ok(())
            }
        }
    }
}

impl SolverChoice {
    pub fn build(&self) -> Box<dyn Solver> {
        match self {
            SolverChoice::Builtin => Box::<BuiltinSolver>::default(),
            SolverChoice::External { command, args } => {
                Box::new(ExternalSolver::new(command.clone(), args.clone()))
            }
        }
    }
}

/// The flags every exploring subcommand shares.
#[derive(Debug, Args)]
pub struct ExploreFlags {
    /// Exploration strategy.
    #[arg(long, value_enum, default_value = "sse")]
    pub strategy: StrategyArg,
    /// Max speculation depth (unconfirmed decisions per batched solve).
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    /// Which branch side to explore first.
    #[arg(long, value_enum, default_value = "false-first")]
    pub order: OrderArg,
    /// Skip solver calls for sides entailed by a sibling's recorded
    /// infeasibility.
    #[arg(long)]
    pub optimize: bool,
    /// Debug: report errors met under unconfirmed speculation without
    /// rechecking their reachability (invites false alarms).
    #[arg(long)]
    pub no_recheck: bool,
    /// Iterations after which a loop's test silently ends the path.
    #[arg(long, default_value_t = 4)]
    pub loop_bound: u64,
    /// Decision procedure: `builtin` or `external:<command>`.
    #[arg(long, default_value = "builtin")]
    pub solver: SolverChoice,
}

impl ExploreFlags {
    pub fn config(&self) -> Result<SearchConfig> {
        if self.depth == 0 {
            return Err(usage("--depth must be at least 1"));
        }
        Ok(SearchConfig {
            strategy: match self.strategy {
                StrategyArg::Pure => Strategy::Pure,
                StrategyArg::Sse => Strategy::Speculative,
            },
            depth: self.depth,
            order: self.order.to_order(),
            optimize: self.optimize,
            recheck: !self.no_recheck,
            loop_bound: self.loop_bound,
            ..SearchConfig::default()
        })
    }
}

/// A program loaded from disk, compiled and ready to explore.
pub struct LoadedProgram {
    pub compiled: CompiledProgram,
    /// Branch decisions on the longest explorable path (loops counted up
    /// to the loop bound); the natural ceiling for speculation depths.
    pub longest_path: u64,
}

pub(crate) fn load_program(path: &Path, loop_bound: u64) -> Result<LoadedProgram> {
    let source = std::fs::read_to_string(path)
        .with_context(|| format!("reading program `{}`", path.display()))?;
    let program = lang::load_program(&source)
        .with_context(|| format!("loading program `{}`", path.display()))?;
    let longest_path = lang::longest_path_branch_count(&program, loop_bound);
    Ok(LoadedProgram { compiled: compile(&program), longest_path })
}

/// Writes `text` to `path`, contextualizing failures with the path.
pub(crate) fn write_output(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing `{}`", path.display()))
}
