//! Feasibility-labeled binary trees: the abstract stand-in for a path
//! space, with each branch side pre-labeled by whether extending the path
//! condition along it stays satisfiable.

use std::fmt;

use thiserror::Error;

use crate::symcore::BranchSide;

/// One side of a branch: its feasibility label and what lies beyond it.
/// An infeasible side is terminal by construction — neither strategy ever
/// explores past one — so its child is always a leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideSlot {
    pub feasible: bool,
    pub child: LabeledTree,
}

/// An abstract execution tree. Branches carry a false side and a true
/// side; a leaf is a path end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabeledTree {
    Leaf,
    Branch { false_side: Box<SideSlot>, true_side: Box<SideSlot> },
}

impl LabeledTree {
    /// A branch with both sides feasible.
    pub fn branch(false_child: LabeledTree, true_child: LabeledTree) -> LabeledTree {
        LabeledTree::Branch {
            false_side: Box::new(SideSlot { feasible: true, child: false_child }),
            true_side: Box::new(SideSlot { feasible: true, child: true_child }),
        }
    }

    /// The full feasible binary tree with `height` branches on every path.
    pub fn full(height: u32) -> LabeledTree {
        if height == 0 {
            LabeledTree::Leaf
        } else {
            let child = LabeledTree::full(height - 1);
            LabeledTree::branch(child.clone(), child)
        }
    }

    pub fn side(&self, side: BranchSide) -> Option<&SideSlot> {
        match self {
            LabeledTree::Leaf => None,
            LabeledTree::Branch { false_side, true_side } => Some(match side {
                BranchSide::False => false_side,
                BranchSide::True => true_side,
            }),
        }
    }

    /// Maximum number of branches along any root-to-leaf path.
    pub fn height(&self) -> u32 {
        match self {
            LabeledTree::Leaf => 0,
            LabeledTree::Branch { false_side, true_side } => {
                1 + false_side.child.height().max(true_side.child.height())
            }
        }
    }

    /// Counts the (side, feasibility) pairs in the whole tree.
    pub fn side_counts(&self) -> SideCounts {
        let mut counts = SideCounts::default();
        fn walk(t: &LabeledTree, counts: &mut SideCounts) {
            if let LabeledTree::Branch { false_side, true_side } = t {
                for slot in [false_side, true_side] {
                    if slot.feasible {
                        counts.feasible += 1;
                    } else {
                        counts.infeasible += 1;
                    }
                    walk(&slot.child, counts);
                }
            }
        }
        walk(self, &mut counts);
        counts
    }

    /// Checks the structural invariants: no branch with both sides
    /// infeasible (a reachable branch always has a satisfiable side), and
    /// nothing below an infeasible side.
    pub fn validate(&self) -> Result<(), TreeError> {
        match self {
            LabeledTree::Leaf => Ok(()),
            LabeledTree::Branch { false_side, true_side } => {
                if !false_side.feasible && !true_side.feasible {
                    return Err(TreeError::BothSidesInfeasible);
                }
                for slot in [false_side, true_side] {
                    if !slot.feasible && slot.child != LabeledTree::Leaf {
                        return Err(TreeError::SubtreeUnderInfeasibleSide);
                    }
                    slot.child.validate()?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SideCounts {
    pub feasible: u64,
    pub infeasible: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("a branch has both sides labeled infeasible")]
    BothSidesInfeasible,
    #[error("an infeasible side has a subtree below it")]
    SubtreeUnderInfeasibleSide,
    #[error("unexpected character `{0}` in tree text")]
    UnexpectedChar(char),
    #[error("unexpected end of tree text")]
    UnexpectedEnd,
    #[error("trailing text after the tree")]
    TrailingText,
}

/// Renders the S-expression form: `leaf`, or `(<side> <side>)` with the
/// false side first, each side a `+` (feasible) or `-` (infeasible)
/// followed by its subtree.
impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabeledTree::Leaf => write!(f, "leaf"),
            LabeledTree::Branch { false_side, true_side } => {
                let mark = |s: &SideSlot| if s.feasible { '+' } else { '-' };
                write!(
                    f,
                    "({}{} {}{})",
                    mark(false_side),
                    false_side.child,
                    mark(true_side),
                    true_side.child
                )
            }
        }
    }
}

/// Parses the textual format produced by `Display`. Whitespace separates
/// tokens freely; `;` starts a comment running to end of line. The result
/// is validated.
pub fn parse_tree(text: &str) -> Result<LabeledTree, TreeError> {
    let mut chars = text.chars().peekable();
    let tree = parse_node(&mut chars)?;
    skip_trivia(&mut chars);
    if chars.next().is_some() {
        return Err(TreeError::TrailingText);
    }
    tree.validate()?;
    Ok(tree)
}

fn skip_trivia(chars: &mut std::iter::Peekable<std::str::Chars<'_>>) {
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == ';' {
            for c in chars.by_ref() {
                if c == '\n' {
                    break;
                }
            }
        } else {
            break;
        }
    }
}

fn parse_node(chars: &mut std::iter::Peekable<std::str::Chars<'_>>) -> Result<LabeledTree, TreeError> {
    skip_trivia(chars);
    match chars.peek() {
        Some('(') => {
            chars.next();
            let false_side = parse_side(chars)?;
            let true_side = parse_side(chars)?;
            skip_trivia(chars);
            match chars.next() {
                Some(')') => Ok(LabeledTree::Branch {
                    false_side: Box::new(false_side),
                    true_side: Box::new(true_side),
                }),
                Some(c) => Err(TreeError::UnexpectedChar(c)),
                None => Err(TreeError::UnexpectedEnd),
            }
        }
        Some('l') => {
            for expected in "leaf".chars() {
                match chars.next() {
                    Some(c) if c == expected => {}
                    Some(c) => return Err(TreeError::UnexpectedChar(c)),
                    None => return Err(TreeError::UnexpectedEnd),
                }
            }
            Ok(LabeledTree::Leaf)
        }
        Some(&c) => Err(TreeError::UnexpectedChar(c)),
        None => Err(TreeError::UnexpectedEnd),
    }
}

fn parse_side(chars: &mut std::iter::Peekable<std::str::Chars<'_>>) -> Result<SideSlot, TreeError> {
    skip_trivia(chars);
    let feasible = match chars.next() {
        Some('+') => true,
        Some('-') => false,
        Some(c) => return Err(TreeError::UnexpectedChar(c)),
        None => return Err(TreeError::UnexpectedEnd),
    };
    let child = parse_node(chars)?;
    Ok(SideSlot { feasible, child })
}
