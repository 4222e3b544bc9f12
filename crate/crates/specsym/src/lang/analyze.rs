//! Semantic validation and static path metrics.

use std::collections::BTreeSet;

use super::ast::{Block, Cond, Expr, Program, Stmt};
use super::SemanticError;

/// Checks that symbolic declarations are unique and that every variable read
/// is either a symbolic input or definitely assigned on all paths reaching
/// the read. Loop bodies are analysed as if they may not run at all, so an
/// assignment inside a loop does not count as definite after the loop.
pub fn validate(program: &Program) -> Result<(), SemanticError> {
    let mut defined = BTreeSet::new();
    for name in &program.sym_inputs {
        if !defined.insert(name.clone()) {
            return Err(SemanticError::DuplicateDecl(name.clone()));
        }
    }
    check_block(&program.body, &mut defined)
}

fn check_block(block: &Block, defined: &mut BTreeSet<String>) -> Result<(), SemanticError> {
    for stmt in block {
        match stmt {
            Stmt::Assign { name, value } => {
                check_expr(value, defined)?;
                defined.insert(name.clone());
            }
            Stmt::If { cond, then_block, else_block } => {
                check_cond(cond, defined)?;
                let mut then_defined = defined.clone();
                check_block(then_block, &mut then_defined)?;
                let mut else_defined = defined.clone();
                check_block(else_block, &mut else_defined)?;
                *defined = then_defined.intersection(&else_defined).cloned().collect();
            }
            Stmt::While { cond, body } => {
                check_cond(cond, defined)?;
                let mut body_defined = defined.clone();
                check_block(body, &mut body_defined)?;
            }
            Stmt::Assert { cond } => check_cond(cond, defined)?,
            Stmt::Print { value } => check_expr(value, defined)?,
            Stmt::Error { .. } => {}
        }
    }
    Ok(())
}

fn check_cond(cond: &Cond, defined: &BTreeSet<String>) -> Result<(), SemanticError> {
    check_expr(&cond.lhs, defined)?;
    check_expr(&cond.rhs, defined)
}

fn check_expr(expr: &Expr, defined: &BTreeSet<String>) -> Result<(), SemanticError> {
    match expr {
        Expr::Int(_) => Ok(()),
        Expr::Var(name) => {
            if defined.contains(name) {
                Ok(())
            } else {
                Err(SemanticError::UseBeforeDef(name.clone()))
            }
        }
        Expr::Neg(e) => check_expr(e, defined),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            check_expr(a, defined)?;
            check_expr(b, defined)
        }
    }
}

/// Upper bound on the number of branching sites along any single execution
/// path, counting conditionals, loop tests up to the iteration bound,
/// assertions and division guards. Used to size exploration traces.
pub fn longest_path_branch_count(program: &Program, loop_bound: u64) -> u64 {
    block_branches(&program.body, loop_bound)
}

fn block_branches(block: &Block, loop_bound: u64) -> u64 {
    block.iter().map(|s| stmt_branches(s, loop_bound)).sum()
}

fn stmt_branches(stmt: &Stmt, loop_bound: u64) -> u64 {
    match stmt {
        // Divisions are hoisted at parse time, so an assignment holds at
        // most one division, always at the root of its right-hand side.
        Stmt::Assign { value, .. } => match value {
            Expr::Div(..) => 1,
            _ => 0,
        },
        Stmt::If { then_block, else_block, .. } => {
            1 + block_branches(then_block, loop_bound)
                .max(block_branches(else_block, loop_bound))
        }
        // Each permitted iteration costs one loop test plus one body pass;
        // the final terminating test is absorbed by the bound itself.
        Stmt::While { body, .. } => {
            loop_bound * (1 + block_branches(body, loop_bound))
        }
        Stmt::Assert { .. } => 1,
        Stmt::Error { .. } | Stmt::Print { .. } => 0,
    }
}
