//! Path conditions: ordered constraint conjunctions with provenance.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::constraint::Constraint;

/// A concrete assignment of integer values to symbols; a satisfying one is
/// a witness for a path condition.
pub type Model = BTreeMap<String, i64>;

/// Which side of a two-way branch a constraint came from. Error sites fork
/// like branches: the erroring side is the false side, the continuing side
/// the true side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchSide {
    False,
    True,
}

impl BranchSide {
    pub fn letter(self) -> char {
        match self {
            BranchSide::False => 'F',
            BranchSide::True => 'T',
        }
    }

    pub fn opposite(self) -> BranchSide {
        match self {
            BranchSide::False => BranchSide::True,
            BranchSide::True => BranchSide::False,
        }
    }
}

impl fmt::Display for BranchSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Cached result of the last feasibility check of a whole path condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Unknown,
    Sat,
    Unsat,
}

/// One conjunct with the branch decision that introduced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcEntry {
    pub constraint: Constraint,
    /// 1-based position of the decision along the path; strictly increasing.
    pub branch_id: u64,
    pub side: BranchSide,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("provenance id {id} not greater than predecessor {prev}")]
pub struct ProvenanceError {
    pub id: u64,
    pub prev: u64,
}

/// An append-only conjunction of constraints along one path, plus a cached
/// feasibility status (and witness when that status is `Sat`).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathCondition {
    entries: Vec<PcEntry>,
    status: Feasibility,
    witness: Option<Model>,
}

impl Default for Feasibility {
    fn default() -> Feasibility {
        Feasibility::Unknown
    }
}

impl PathCondition {
    /// The empty (vacuously satisfiable) path condition.
    pub fn empty() -> PathCondition {
        PathCondition {
            entries: Vec::new(),
            status: Feasibility::Sat,
            witness: Some(Model::new()),
        }
    }

    /// Value-semantics append: returns a new path condition with `unknown`
    /// feasibility; the original is untouched.
    pub fn append(
        &self,
        constraint: Constraint,
        branch_id: u64,
        side: BranchSide,
    ) -> Result<PathCondition, ProvenanceError> {
        let prev = self.entries.last().map_or(0, |e| e.branch_id);
        if branch_id <= prev {
            return Err(ProvenanceError { id: branch_id, prev });
        }
        let mut entries = self.entries.clone();
        entries.push(PcEntry { constraint, branch_id, side });
        Ok(PathCondition { entries, status: Feasibility::Unknown, witness: None })
    }

    pub fn entries(&self) -> &[PcEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn constraints(&self) -> Vec<Constraint> {
        self.entries.iter().map(|e| e.constraint.clone()).collect()
    }

    /// The branch sides along this path, rendered as a string like "TFT".
    pub fn side_string(&self) -> String {
        self.entries.iter().map(|e| e.side.letter()).collect()
    }

    pub fn status(&self) -> Feasibility {
        self.status
    }

    pub fn witness(&self) -> Option<&Model> {
        self.witness.as_ref()
    }

    /// Marks the conjunction satisfiable, keeping the witness if one is
    /// known (ledger-based confirmations inherit the parent's witness).
    pub fn set_sat(&mut self, witness: Option<Model>) {
        self.status = Feasibility::Sat;
        self.witness = witness;
    }

    pub fn set_unsat(&mut self) {
        self.status = Feasibility::Unsat;
        self.witness = None;
    }
}

impl fmt::Display for PathCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "{}", e.constraint)?;
        }
        write!(f, "⟩")
    }
}
