//! `treesim`: the abstract path-space simulator, driven three ways —
//! pinned fixture replays, randomized strategy-ratio measurement, and the
//! closed-form full-tree prediction check.

use anyhow::Result;
use clap::{Args, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use specsym::search::ExplorationOrder;
use specsym::treesim::{
    eq1_formula, gen_random_tree, replay_fixture, simulate_pure, simulate_sse, LabeledTree,
    FIXTURE_NAMES,
};

use super::{order_name, usage};
use crate::{EXIT_ERROR, EXIT_OK};

#[derive(Debug, Subcommand)]
pub enum TreesimCmd {
    /// Re-run the pinned fixture scenarios and diff their probe traces.
    Replay(ReplayArgs),
    /// Measure the speculative/pure probe-count ratio over random trees;
    /// the claim under test is that it always stays above one half.
    Random(RandomArgs),
    /// Check the closed-form prediction for full trees against simulation
    /// on an exhaustive (height, depth) grid.
    Eq1(Eq1Args),
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Replay only this fixture (default: all of them).
    #[arg(long)]
    pub fixture: Option<String>,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    /// How many random trees to measure.
    #[arg(long, default_value_t = 10_000)]
    pub trees: u64,
    /// Seed for tree shapes and per-tree configurations.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Tree heights are drawn uniformly from 1..=this.
    #[arg(long, default_value_t = 12)]
    pub max_height: u32,
    /// Speculation depths are drawn uniformly from 1..=this.
    #[arg(long, default_value_t = 12)]
    pub max_depth: u32,
}

#[derive(Debug, Args)]
pub struct Eq1Args {
    /// Check every height and speculation depth in 1..=this.
    #[arg(long, default_value_t = 12)]
    pub max: u32,
}

pub fn execute(cmd: TreesimCmd) -> Result<i32> {
    match cmd {
        TreesimCmd::Replay(args) => replay(args),
        TreesimCmd::Random(args) => random(args),
        TreesimCmd::Eq1(args) => eq1(args),
    }
}

fn replay(args: ReplayArgs) -> Result<i32> {
    let names: Vec<&str> = match &args.fixture {
        Some(name) => vec![name.as_str()],
        None => FIXTURE_NAMES.to_vec(),
    };
    let mut failures = 0;
    for name in &names {
        let replay = replay_fixture(name).map_err(|e| usage(e.to_string()))?;
        if replay.matches {
            println!(
                "{name}: pass — {} probes ({} sat, {} unsat, {} avoided)",
                replay.result.total, replay.result.sat, replay.result.unsat, replay.result.avoided
            );
        } else {
            failures += 1;
            match replay.first_mismatch() {
                Some(i) => {
                    let got = replay.result.trace.get(i - 1);
                    let want = replay.expected_trace.get(i - 1);
                    println!("{name}: FAIL — first differing probe #{i}: got {got:?}, want {want:?}");
                }
                None => println!(
                    "{name}: FAIL — probes match but avoided sides differ: got {:?}, want {:?}",
                    replay.result.avoided_sides, replay.expected_avoided
                ),
            }
        }
    }
    println!("{}/{} fixtures pass", names.len() - failures, names.len());
    Ok(if failures == 0 { EXIT_OK } else { EXIT_ERROR })
}

/// The probability grid the random measurement draws infeasibility rates
/// from: feasible-heavy to adversarial.
const P_CHOICES: [f64; 4] = [0.0, 0.1, 0.25, 0.42];

struct Measured {
    ratio: f64,
    height: u32,
    p: f64,
    k: u32,
    order: ExplorationOrder,
    tree_seed: u64,
}

fn random(args: RandomArgs) -> Result<i32> {
    if args.trees == 0 || args.max_height == 0 || args.max_depth == 0 {
        return Err(usage("--trees, --max-height, and --max-depth must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut worst: Option<Measured> = None;
    for _ in 0..args.trees {
        let height = rng.gen_range(1..=args.max_height);
        let p = P_CHOICES[rng.gen_range(0..P_CHOICES.len())];
        let k = rng.gen_range(1..=args.max_depth);
        let order = if rng.gen_bool(0.5) {
            ExplorationOrder::FalseFirst
        } else {
            ExplorationOrder::TrueFirst
        };
        let tree_seed = rng.gen();
        let tree = gen_random_tree(height, p, tree_seed);
        let m = measure(&tree, k, order, height, p, tree_seed);
        if worst.as_ref().is_none_or(|w| m.ratio < w.ratio) {
            worst = Some(m);
        }
    }
    let worst = worst.expect("at least one tree was measured");
    println!(
        "measured {} trees (seed {}, heights 1..={}, depths 1..={})",
        args.trees, args.seed, args.max_height, args.max_depth
    );
    println!(
        "min speculative/pure ratio: {:.4} (height {}, p {}, k {}, {}, tree seed {})",
        worst.ratio,
        worst.height,
        worst.p,
        worst.k,
        order_name(worst.order),
        worst.tree_seed
    );
    if worst.ratio > 0.5 {
        println!("every ratio stays above 1/2");
        Ok(EXIT_OK)
    } else {
        println!("VIOLATION: a ratio at or below 1/2 exists");
        Ok(EXIT_ERROR)
    }
}

fn measure(
    tree: &LabeledTree,
    k: u32,
    order: ExplorationOrder,
    height: u32,
    p: f64,
    tree_seed: u64,
) -> Measured {
    let pure = simulate_pure(tree, order);
    let sse = simulate_sse(tree, k, order, false);
    Measured {
        ratio: sse.total as f64 / pure.total as f64,
        height,
        p,
        k,
        order,
        tree_seed,
    }
}

fn eq1(args: Eq1Args) -> Result<i32> {
    if args.max == 0 || args.max > 30 {
        return Err(usage("--max must be between 1 and 30"));
    }
    let mut mismatches = 0u32;
    let total = args.max * args.max;
    for n in 1..=args.max {
        let tree = LabeledTree::full(n);
        for k in 1..=args.max {
            let predicted = eq1_formula(n, k);
            let simulated = simulate_sse(&tree, k, ExplorationOrder::FalseFirst, false).total;
            if predicted != simulated {
                mismatches += 1;
                println!("n={n} k={k}: predicted {predicted}, simulated {simulated}");
            }
        }
    }
    println!("{}/{total} grid cells match the prediction", total - mismatches);
    Ok(if mismatches == 0 { EXIT_OK } else { EXIT_ERROR })
}
