//! Named replay fixtures: small trees with hard-coded expected probe
//! traces, used to pin the simulators' intermediate behavior — not just
//! totals — to known ground truth.

use thiserror::Error;

use crate::search::ExplorationOrder;

use super::sim::{simulate_pure, simulate_sse, SimResult};
use super::tree::{parse_tree, LabeledTree};

pub const FIG3_TREE: &str = include_str!("../../fixtures/fig3.tree");
pub const FIG4_TREE: &str = include_str!("../../fixtures/fig4.tree");
pub const FIG7_TREE: &str = include_str!("../../fixtures/fig7.tree");

/// The five replayable fixtures.
pub const FIXTURE_NAMES: [&str; 5] = ["fig3a", "fig3b", "fig4a", "fig4b", "fig7"];

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown fixture `{0}` (expected one of fig3a, fig3b, fig4a, fig4b, fig7)")]
pub struct UnknownFixture(pub String);

/// A replayed fixture: the fresh simulation next to its pinned
/// expectations, with the comparison already made.
#[derive(Debug, Clone)]
pub struct FixtureReplay {
    pub name: &'static str,
    pub result: SimResult,
    pub expected_trace: Vec<(String, bool)>,
    pub expected_avoided: Vec<String>,
    pub matches: bool,
}

impl FixtureReplay {
    /// The first probe (1-based ordinal) where the replay diverges from
    /// the expectation, if any.
    pub fn first_mismatch(&self) -> Option<usize> {
        self.result
            .trace
            .iter()
            .zip(&self.expected_trace)
            .position(|(got, want)| got != want)
            .or_else(|| {
                (self.result.trace.len() != self.expected_trace.len())
                    .then(|| self.result.trace.len().min(self.expected_trace.len()))
            })
            .map(|i| i + 1)
    }
}

fn expect(trace: &[(&str, bool)]) -> Vec<(String, bool)> {
    trace.iter().map(|(s, v)| (s.to_string(), *v)).collect()
}

/// Replays a named fixture and compares it against its pinned trace.
pub fn replay_fixture(name: &str) -> Result<FixtureReplay, UnknownFixture> {
    use ExplorationOrder::{FalseFirst, TrueFirst};
    let (name, tree_text, result, expected_trace, expected_avoided): (
        &'static str,
        &str,
        fn(&LabeledTree) -> SimResult,
        Vec<(String, bool)>,
        Vec<String>,
    ) = match name {
        "fig3a" => (
            "fig3a",
            FIG3_TREE,
            (|t| simulate_pure(t, FalseFirst)) as fn(&LabeledTree) -> SimResult,
            expect(&[
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
            ]),
            vec![],
        ),
        "fig3b" => (
            "fig3b",
            FIG3_TREE,
            |t| simulate_sse(t, 3, FalseFirst, false),
            expect(&[
                ("FFF", true),
                ("FFT", true),
                ("FTF", true),
                ("FTT", true),
                ("TFF", true),
                ("TFT", true),
                ("TTF", true),
                ("TTT", true),
            ]),
            vec![],
        ),
        "fig4a" => (
            "fig4a",
            FIG4_TREE,
            |t| simulate_sse(t, 3, FalseFirst, false),
            expect(&[
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
            ]),
            vec![],
        ),
        "fig4b" => (
            "fig4b",
            FIG4_TREE,
            |t| simulate_sse(t, 3, TrueFirst, false),
            expect(&[
                ("TTT", true),
                ("TTF", false),
                ("TFT", true),
                ("TFF", false),
                ("FTT", true),
                ("FTF", true),
                ("FFT", true),
                ("FFF", true),
            ]),
            vec![],
        ),
        "fig7" => (
            "fig7",
            FIG7_TREE,
            |t| simulate_sse(t, 3, FalseFirst, true),
            expect(&[
                ("FFF", true),
                ("FFT", true),
                ("FTF", true),
                ("FTT", true),
                ("TFF", false),
                ("T", true),
                ("TF", true),
                ("TTF", false),
                ("TT", true),
            ]),
            vec!["TFT".to_string(), "TTT".to_string()],
        ),
        other => return Err(UnknownFixture(other.to_string())),
    };
    let tree = parse_tree(tree_text).expect("embedded fixture trees parse");
    let res = result(&tree);
    let matches = res.trace == expected_trace && res.avoided_sides == expected_avoided;
    Ok(FixtureReplay {
        name,
        result: res,
        expected_trace,
        expected_avoided,
        matches,
    })
}
