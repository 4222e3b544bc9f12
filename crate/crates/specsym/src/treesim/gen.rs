//! Reproducible random labeled trees for property tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tree::{LabeledTree, SideSlot};

/// Generates a random labeled tree of at most `height` branches per path.
/// Each side of each branch is drawn infeasible with probability `p`
/// independently; if both sides come up infeasible, a fair coin forces one
/// back to feasible, so a reachable branch always has a way through. The
/// resulting marginal probability of a side being infeasible is
/// `p * (2 - p) / 2`. Identical `(height, p, seed)` always yields the
/// identical tree.
pub fn gen_random_tree(height: u32, p: f64, seed: u64) -> LabeledTree {
    assert!((0.0..1.0).contains(&p), "infeasibility probability must be in [0, 1)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_node(height, p, &mut rng)
}

fn gen_node(height: u32, p: f64, rng: &mut ChaCha8Rng) -> LabeledTree {
    if height == 0 {
        return LabeledTree::Leaf;
    }
    let mut false_infeasible = rng.gen_bool(p);
    let mut true_infeasible = rng.gen_bool(p);
    if false_infeasible && true_infeasible {
        if rng.gen_bool(0.5) {
            false_infeasible = false;
        } else {
            true_infeasible = false;
        }
    }
    let false_side = gen_side(false_infeasible, height, p, rng);
    let true_side = gen_side(true_infeasible, height, p, rng);
    LabeledTree::Branch { false_side: Box::new(false_side), true_side: Box::new(true_side) }
}

fn gen_side(infeasible: bool, height: u32, p: f64, rng: &mut ChaCha8Rng) -> SideSlot {
    if infeasible {
        SideSlot { feasible: false, child: LabeledTree::Leaf }
    } else {
        SideSlot { feasible: true, child: gen_node(height - 1, p, rng) }
    }
}
