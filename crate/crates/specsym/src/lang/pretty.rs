//! Canonical source formatting for parsed programs.
//!
//! `pretty_print` emits two-space indented source with minimal parentheses;
//! re-parsing the output yields a structurally identical program.

use std::fmt::Write;

use super::ast::{Block, Cond, Expr, Program, Stmt};

/// Renders a program back to canonical source text.
pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    for name in &program.sym_inputs {
        let _ = writeln!(out, "sym int {name};");
    }
    write_block_stmts(&mut out, &program.body, 0);
    out
}

fn write_block_stmts(out: &mut String, block: &Block, indent: usize) {
    for stmt in block {
        write_stmt(out, stmt, indent);
    }
}

fn write_stmt(out: &mut String, stmt: &Stmt, indent: usize) {
    let pad = "  ".repeat(indent);
    match stmt {
        Stmt::Assign { name, value } => {
            let _ = writeln!(out, "{pad}{name} = {};", expr_str(value));
        }
        Stmt::If { cond, then_block, else_block } => {
            let _ = writeln!(out, "{pad}if ({}) {{", cond_str(cond));
            write_block_stmts(out, then_block, indent + 1);
            if else_block.is_empty() {
                let _ = writeln!(out, "{pad}}}");
            } else {
                let _ = writeln!(out, "{pad}}} else {{");
                write_block_stmts(out, else_block, indent + 1);
                let _ = writeln!(out, "{pad}}}");
            }
        }
        Stmt::While { cond, body } => {
            let _ = writeln!(out, "{pad}while ({}) {{", cond_str(cond));
            write_block_stmts(out, body, indent + 1);
            let _ = writeln!(out, "{pad}}}");
        }
        Stmt::Assert { cond } => {
            let _ = writeln!(out, "{pad}assert({});", cond_str(cond));
        }
        Stmt::Error { message } => {
            let _ = writeln!(out, "{pad}error(\"{message}\");");
        }
        Stmt::Print { value } => {
            let _ = writeln!(out, "{pad}print({});", expr_str(value));
        }
    }
}

pub(crate) fn cond_str(cond: &Cond) -> String {
    format!("{} {} {}", expr_str(&cond.lhs), cond.op.symbol(), expr_str(&cond.rhs))
}

/// Expression rendering with minimal parentheses. `min_prec` is the lowest
/// precedence printable without parentheses at this position: 1 for a
/// sum position, 2 for a product position, 3 for a factor position.
pub(crate) fn expr_str(expr: &Expr) -> String {
    expr_prec(expr, 1)
}

fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Int(_) | Expr::Var(_) | Expr::Neg(_) => 3,
    }
}

fn expr_prec(expr: &Expr, min_prec: u8) -> String {
    let rendered = match expr {
        Expr::Int(n) => n.to_string(),
        Expr::Var(name) => name.clone(),
        Expr::Neg(e) => format!("-{}", expr_prec(e, 3)),
        Expr::Add(a, b) => format!("{} + {}", expr_prec(a, 1), expr_prec(b, 2)),
        Expr::Sub(a, b) => format!("{} - {}", expr_prec(a, 1), expr_prec(b, 2)),
        Expr::Mul(a, b) => format!("{} * {}", expr_prec(a, 2), expr_prec(b, 3)),
        Expr::Div(a, b) => format!("{} / {}", expr_prec(a, 2), expr_prec(b, 3)),
    };
    if precedence(expr) < min_prec {
        format!("({rendered})")
    } else {
        rendered
    }
}
