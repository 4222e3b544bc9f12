//! Abstract syntax for `.sx` programs.

use serde::{Deserialize, Serialize};

/// A complete program: symbolic input declarations followed by a body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    /// Declared symbolic integer inputs, in declaration order.
    pub sym_inputs: Vec<String>,
    pub body: Block,
}

/// A brace-delimited statement sequence.
pub type Block = Vec<Stmt>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign { name: String, value: Expr },
    If { cond: Cond, then_block: Block, else_block: Block },
    While { cond: Cond, body: Block },
    Assert { cond: Cond },
    /// `error("msg");` — an unconditional error site; the path ends here.
    Error { message: String },
    Print { value: Expr },
}

/// Integer expressions. Multiplication is restricted to a literal operand
/// at parse time; division may have a fully symbolic divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

/// A relational comparison. Boolean negation `!(c)` is folded away at parse
/// time, so a condition is always a single comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cond {
    pub lhs: Expr,
    pub op: RelOp,
    pub rhs: Expr,
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&super::pretty::expr_str(self))
    }
}

impl std::fmt::Display for Cond {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&super::pretty::cond_str(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl RelOp {
    /// The complementary relation: `negate(x op y)` is `x op.complement() y`.
    pub fn complement(self) -> RelOp {
        match self {
            RelOp::Lt => RelOp::Ge,
            RelOp::Le => RelOp::Gt,
            RelOp::Gt => RelOp::Le,
            RelOp::Ge => RelOp::Lt,
            RelOp::Eq => RelOp::Ne,
            RelOp::Ne => RelOp::Eq,
        }
    }

    /// True for the `==`/`!=` family, false for the order relations.
    pub fn is_equation(self) -> bool {
        matches!(self, RelOp::Eq | RelOp::Ne)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
        }
    }
}

impl Cond {
    /// Logical negation. Closed over the relation set and involutive:
    /// `c.negate().negate() == c`.
    pub fn negate(&self) -> Cond {
        Cond { lhs: self.lhs.clone(), op: self.op.complement(), rhs: self.rhs.clone() }
    }
}

impl Expr {
    /// True for an integer literal (possibly produced by constant-folding a
    /// unary minus during parsing).
    pub fn is_literal(&self) -> bool {
        matches!(self, Expr::Int(_))
    }

    /// True if the expression contains no division anywhere.
    pub fn is_division_free(&self) -> bool {
        match self {
            Expr::Int(_) | Expr::Var(_) => true,
            Expr::Neg(e) => e.is_division_free(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.is_division_free() && b.is_division_free()
            }
            Expr::Div(..) => false,
        }
    }
}
