//! `compare`: the correctness oracle. The speculative strategy must visit
//! exactly the path tree the pure one visits — same completed leaves, same
//! reported errors — for every depth, order, and optimization setting.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use specsym::search::{
    explore, EndKind, ExplorationOrder, ExplorationRecord, SearchConfig, SolverFailure, Strategy,
};

use super::{load_program, order_name, usage, LoadedProgram, SolverChoice};
use crate::{EXIT_ERROR, EXIT_OK, EXIT_SOLVER};

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Program to compare strategies on (`.sx`).
    pub program: PathBuf,
    /// Speculation depths to check, comma separated; defaults to every
    /// depth from 1 to the longest path's branch count.
    #[arg(long, value_delimiter = ',')]
    pub depths: Option<Vec<u32>>,
    /// Debug: disable reachability rechecks in the speculative runs (the
    /// negative control — spurious error leaves should then surface).
    #[arg(long)]
    pub no_recheck: bool,
    /// Iterations after which a loop's test silently ends the path.
    #[arg(long, default_value_t = 4)]
    pub loop_bound: u64,
    /// Decision procedure: `builtin` or `external:<command>`.
    #[arg(long, default_value = "builtin")]
    pub solver: SolverChoice,
}

/// A path tree reduced to what both strategies must agree on: how often
/// each completed path (normal or error end) was reached. Pruned leaves
/// are bookkeeping, not tree content, and are compared separately by the
/// test suites.
type LeafMultiset = BTreeMap<(String, EndKind), usize>;

fn leaf_multiset(rec: &ExplorationRecord) -> LeafMultiset {
    let mut set = LeafMultiset::new();
    for leaf in &rec.leaves {
        if leaf.end != EndKind::PrunedInfeasible {
            *set.entry((leaf.sides.clone(), leaf.end)).or_default() += 1;
        }
    }
    set
}

/// The smallest leaf present a different number of times in the two sets.
fn first_mismatch(
    pure: &LeafMultiset,
    sse: &LeafMultiset,
) -> Option<((String, EndKind), usize, usize)> {
    let keys = pure.keys().chain(sse.keys());
    let mut keys: Vec<_> = keys.collect();
    keys.sort();
    keys.dedup();
    for key in keys {
        let p = pure.get(key).copied().unwrap_or(0);
        let s = sse.get(key).copied().unwrap_or(0);
        if p != s {
            return Some((key.clone(), p, s));
        }
    }
    None
}

fn run_config(
    program: &LoadedProgram,
    solver: &SolverChoice,
    config: &SearchConfig,
) -> Result<ExplorationRecord, SolverFailure> {
    let mut s = solver.build();
    explore(&program.compiled, config, s.as_mut())
}

pub fn execute(args: CompareArgs) -> Result<i32> {
    let program = load_program(&args.program, args.loop_bound)?;
    let depths: Vec<u32> = match &args.depths {
        Some(ds) => {
            if ds.iter().any(|&d| d == 0) {
                return Err(usage("--depths entries must be at least 1"));
            }
            ds.clone()
        }
        None => (1..=program.longest_path.clamp(1, 64) as u32).collect(),
    };

    let pure_config = SearchConfig {
        strategy: Strategy::Pure,
        depth: 1,
        order: ExplorationOrder::FalseFirst,
        optimize: false,
        loop_bound: args.loop_bound,
        ..SearchConfig::default()
    };
    let pure_rec = match run_config(&program, &args.solver, &pure_config) {
        Ok(rec) => rec,
        Err(failure) => {
            eprintln!("error: pure baseline aborted: {failure:#}");
            return Ok(EXIT_SOLVER);
        }
    };
    let pure_leaves = leaf_multiset(&pure_rec);
    let compared: usize = pure_leaves.values().sum();

    let mut combinations = 0usize;
    for &k in &depths {
        for order in [ExplorationOrder::FalseFirst, ExplorationOrder::TrueFirst] {
            for optimize in [false, true] {
                let config = SearchConfig {
                    strategy: Strategy::Speculative,
                    depth: k,
                    order,
                    optimize,
                    recheck: !args.no_recheck,
                    loop_bound: args.loop_bound,
                    ..SearchConfig::default()
                };
                let rec = match run_config(&program, &args.solver, &config) {
                    Ok(rec) => rec,
                    Err(failure) => {
                        eprintln!("error: speculative run aborted: {failure:#}");
                        return Ok(EXIT_SOLVER);
                    }
                };
                combinations += 1;
                let sse_leaves = leaf_multiset(&rec);
                if let Some(((sides, end), p, s)) = first_mismatch(&pure_leaves, &sse_leaves) {
                    println!(
                        "FAIL {}: k={k} order={} optimize={}: leaf `{sides}` ({end:?}) \
                         appears {s} time(s) speculatively but {p} time(s) purely",
                        args.program.display(),
                        order_name(order),
                        if optimize { "on" } else { "off" },
                    );
                    return Ok(EXIT_ERROR);
                }
            }
        }
    }
    println!(
        "PASS {}: {combinations} speculative configurations match the pure tree \
         ({compared} completed leaves)",
        args.program.display()
    );
    Ok(EXIT_OK)
}
