//! Strategy simulators over labeled trees.
//!
//! These mirror the search strategies exactly, with feasibility labels
//! standing in for solver verdicts: probing a prefix answers whether every
//! side on it is labeled feasible. Because infeasible sides are terminal,
//! a failed batch always localizes to its last position — the bisection
//! spends its probes confirming the prefix, exactly the cost the search
//! engine pays.

use std::collections::BTreeMap;

use crate::search::{localize, ExplorationOrder};
use crate::solver::SolverException;
use crate::symcore::BranchSide;

use super::tree::{LabeledTree, SideSlot};

/// What one simulated exploration cost.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimResult {
    /// Solver invocations: always `sat + unsat`.
    pub total: u64,
    pub sat: u64,
    pub unsat: u64,
    /// Solves skipped because the sibling side was recorded infeasible.
    pub avoided: u64,
    /// Every probe in issue order: the prefix's sides and its verdict.
    pub trace: Vec<(String, bool)>,
    /// Sides taken without a probe, in order.
    pub avoided_sides: Vec<String>,
}

impl SimResult {
    fn probe_prefix(&mut self, sides: String, sat: bool) -> bool {
        self.total += 1;
        if sat {
            self.sat += 1;
        } else {
            self.unsat += 1;
        }
        self.trace.push((sides, sat));
        sat
    }
}

/// Depth-first search that probes every side of every reachable branch the
/// moment it is taken. Infeasible sides are pruned; nothing is avoided.
pub fn simulate_pure(tree: &LabeledTree, order: ExplorationOrder) -> SimResult {
    debug_assert!(tree.validate().is_ok());
    let mut res = SimResult::default();
    let mut sides = String::new();
    walk_pure(tree, order, &mut sides, &mut res);
    res
}

fn walk_pure(node: &LabeledTree, order: ExplorationOrder, sides: &mut String, res: &mut SimResult) {
    if let LabeledTree::Leaf = node {
        return;
    }
    let first = order.first();
    for side in [first, first.opposite()] {
        let slot = node.side(side).expect("branch node");
        sides.push(side.letter());
        if res.probe_prefix(sides.clone(), slot.feasible) {
            walk_pure(&slot.child, order, sides, res);
        }
        sides.pop();
    }
}

/// Speculative search over a labeled tree: sides are taken unchecked until
/// `k` unconfirmed decisions accumulate or a leaf is reached, the prefix is
/// probed as one batch, and failures are localized by bisection with the
/// first bad side recorded in a ledger that (optionally) lets the sibling
/// side be taken probe-free.
pub fn simulate_sse(
    tree: &LabeledTree,
    k: u32,
    order: ExplorationOrder,
    optimize: bool,
) -> SimResult {
    assert!(k >= 1, "speculation depth must be at least 1");
    debug_assert!(tree.validate().is_ok());
    let mut sim = Sim {
        k: k as usize,
        order,
        optimize,
        stack: Vec::new(),
        ledger: BTreeMap::new(),
        res: SimResult::default(),
    };
    let mut cur = Some(tree);
    while let Some(node) = cur {
        cur = match sim.advance(node) {
            Some(next) => Some(next),
            None => sim.backtrack(),
        };
    }
    sim.res
}

struct Slot<'a> {
    /// The branch node this decision sits at.
    node: &'a LabeledTree,
    taken: BranchSide,
    feasible: bool,
    pending: bool,
    confirmed: bool,
}

struct Sim<'a> {
    k: usize,
    order: ExplorationOrder,
    optimize: bool,
    stack: Vec<Slot<'a>>,
    ledger: BTreeMap<usize, BranchSide>,
    res: SimResult,
}

impl<'a> Sim<'a> {
    fn unconfirmed(&self) -> usize {
        self.stack.iter().filter(|s| !s.confirmed).count()
    }

    fn sides(&self, len: usize) -> String {
        self.stack[..len].iter().map(|s| s.taken.letter()).collect()
    }

    fn prefix_feasible(&self, len: usize) -> bool {
        self.stack[..len].iter().all(|s| s.feasible)
    }

    fn probe(&mut self, len: usize) -> bool {
        let sides = self.sides(len);
        let sat = self.prefix_feasible(len);
        self.res.probe_prefix(sides, sat)
    }

    fn confirm_prefix(&mut self, upto: usize) {
        for slot in &mut self.stack[..upto] {
            slot.confirmed = true;
        }
    }

    fn take(&mut self, node: &'a LabeledTree, side: BranchSide, pending: bool) -> &'a SideSlot {
        let slot = node.side(side).expect("branch node");
        self.stack.push(Slot {
            node,
            taken: side,
            feasible: slot.feasible,
            pending,
            confirmed: false,
        });
        slot
    }

    fn advance(&mut self, node: &'a LabeledTree) -> Option<&'a LabeledTree> {
        match node {
            LabeledTree::Leaf => {
                if self.unconfirmed() > 0 {
                    let len = self.stack.len();
                    if self.probe(len) {
                        self.confirm_prefix(len);
                    } else {
                        self.fail(len);
                    }
                }
                None
            }
            LabeledTree::Branch { .. } => {
                let slot = self.take(node, self.order.first(), true);
                self.boundary_check().map(|()| &slot.child)
            }
        }
    }

    /// Probes the whole prefix if `k` unconfirmed decisions accumulated.
    /// `Some(())` means the path may continue.
    fn boundary_check(&mut self) -> Option<()> {
        if self.unconfirmed() < self.k {
            return Some(());
        }
        let len = self.stack.len();
        if self.probe(len) {
            self.confirm_prefix(len);
            Some(())
        } else {
            self.fail(len);
            None
        }
    }

    /// Localizes a failed batch. On a labeled tree the first bad position
    /// is provably the last (infeasible sides are terminal), so every
    /// bisection probe lands satisfiable; the cost is still paid.
    fn fail(&mut self, failed_len: usize) {
        let base = self.stack.iter().take_while(|s| s.confirmed).count();
        let loc = localize(base, failed_len, |i| {
            Ok::<bool, SolverException>(self.probe(i))
        })
        .expect("label probes cannot fail");
        debug_assert_eq!(loc.first_bad, failed_len);
        self.confirm_prefix(loc.first_bad - 1);
        if self.optimize {
            let bad = &self.stack[loc.first_bad - 1];
            self.ledger.insert(loc.first_bad, bad.taken);
        }
        self.stack.truncate(loc.first_bad);
    }

    fn backtrack(&mut self) -> Option<&'a LabeledTree> {
        loop {
            let pos = self.stack.len();
            let top = self.stack.last_mut()?;
            if !top.pending {
                self.stack.pop();
                continue;
            }
            top.pending = false;
            let node = top.node;
            let sibling = top.taken.opposite();
            self.ledger.retain(|&p, _| p <= pos);
            let slot = node.side(sibling).expect("branch node");
            let top = self.stack.last_mut().expect("slot still present");
            top.taken = sibling;
            top.feasible = slot.feasible;
            if self.optimize && self.ledger.get(&pos) == Some(&sibling.opposite()) {
                self.res.avoided += 1;
                let sides = self.sides(pos);
                self.res.avoided_sides.push(sides);
                let top = self.stack.last_mut().expect("slot still present");
                top.confirmed = true;
                return Some(&slot.child);
            }
            let top = self.stack.last_mut().expect("slot still present");
            top.confirmed = false;
            match self.boundary_check() {
                Some(()) => return Some(&slot.child),
                None => continue,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treesim::tree::parse_tree;
    use ExplorationOrder::{FalseFirst, TrueFirst};

    fn fig4_shape() -> LabeledTree {
        parse_tree("(+(+(+leaf +leaf) +(+leaf +leaf)) +(+(-leaf +leaf) +(-leaf +leaf)))")
            .unwrap()
    }

    fn trace(res: &SimResult) -> Vec<(&str, bool)> {
        res.trace.iter().map(|(s, v)| (s.as_str(), *v)).collect()
    }

    #[test]
    fn pure_probes_every_side_of_the_full_height_three_tree() {
        let res = simulate_pure(&LabeledTree::full(3), FalseFirst);
        assert_eq!(res.total, 14);
        assert_eq!(res.sat, 14);
        assert_eq!(
            trace(&res),
            [
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
            ]
        );
    }

    #[test]
    fn pure_on_a_single_leaf_probes_nothing() {
        assert_eq!(simulate_pure(&LabeledTree::Leaf, FalseFirst).total, 0);
    }

    #[test]
    fn pure_on_a_lone_branch_with_one_dead_side_probes_both() {
        let t = parse_tree("(-leaf +leaf)").unwrap();
        let res = simulate_pure(&t, FalseFirst);
        assert_eq!(res.total, 2);
        assert_eq!(res.sat, 1);
        assert_eq!(res.unsat, 1);
        assert_eq!(trace(&res), [("F", false), ("T", true)]);
    }

    #[test]
    fn sse_covering_whole_paths_probes_once_per_leaf() {
        let res = simulate_sse(&LabeledTree::full(3), 3, FalseFirst, false);
        assert_eq!(
            trace(&res),
            [
                ("FFF", true),
                ("FFT", true),
                ("FTF", true),
                ("FTT", true),
                ("TFF", true),
                ("TFT", true),
                ("TTF", true),
                ("TTT", true),
            ]
        );
    }

    #[test]
    fn sse_localizes_batch_failures_by_probing_prefixes() {
        let res = simulate_sse(&fig4_shape(), 3, FalseFirst, false);
        assert_eq!(
            trace(&res),
            [
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
            ]
        );
        assert_eq!(res.total, 11);
        assert_eq!(res.sat, 9);
        assert_eq!(res.unsat, 2);
    }

    #[test]
    fn sse_true_first_meets_the_dead_sides_at_path_ends() {
        let res = simulate_sse(&fig4_shape(), 3, TrueFirst, false);
        assert_eq!(
            trace(&res),
            [
                ("TTT", true),
                ("TTF", false),
                ("TFT", true),
                ("TFF", false),
                ("FTT", true),
                ("FTF", true),
                ("FFT", true),
                ("FFF", true),
            ]
        );
    }

    #[test]
    fn sse_with_absurdity_skips_the_entailed_siblings() {
        let res = simulate_sse(&fig4_shape(), 3, FalseFirst, true);
        assert_eq!(
            trace(&res),
            [
                ("FFF", true),
                ("FFT", true),
                ("FTF", true),
                ("FTT", true),
                ("TFF", false),
                ("T", true),
                ("TF", true),
                ("TTF", false),
                ("TT", true),
            ]
        );
        assert_eq!(res.avoided, 2);
        assert_eq!(res.avoided_sides, ["TFT", "TTT"]);
    }

    #[test]
    fn sse_depth_one_without_absurdity_equals_pure_counts() {
        for text in [
            "(+(+(+leaf +leaf) +(+leaf +leaf)) +(+(-leaf +leaf) +(-leaf +leaf)))",
            "(-leaf +(+leaf -leaf))",
            "(+leaf -leaf)",
        ] {
            let t = parse_tree(text).unwrap();
            for order in [FalseFirst, TrueFirst] {
                let pure = simulate_pure(&t, order);
                let sse = simulate_sse(&t, 1, order, false);
                assert_eq!(pure.total, sse.total, "{text}");
                assert_eq!(trace(&pure), trace(&sse), "{text}");
            }
        }
    }

    #[test]
    fn basis_case_one_branch_needs_two_probes_either_way() {
        let t = parse_tree("(-leaf +leaf)").unwrap();
        for k in 1..=4 {
            let res = simulate_sse(&t, k, FalseFirst, false);
            assert_eq!(res.total, 2, "k={k}");
        }
    }
}
