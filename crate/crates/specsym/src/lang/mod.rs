//! The `.sx` input language: a small imperative integer language with
//! symbolic inputs, linear arithmetic, two-way conditionals, bounded loops,
//! assertions and explicit error statements.

mod analyze;
mod ast;
mod lexer;
mod parser;
mod pretty;

pub use analyze::{longest_path_branch_count, validate};
pub use ast::{Block, Cond, Expr, Program, RelOp, Stmt};
pub use lexer::{LexError, Span, Token, TokenKind};
pub use parser::{parse_program, ParseError};
pub use pretty::pretty_print;

use thiserror::Error;

/// Any error produced while loading a program from source text.
#[derive(Debug, Error)]
pub enum LangError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

/// Errors found by semantic validation after a successful parse.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticError {
    #[error("duplicate symbolic declaration of `{0}`")]
    DuplicateDecl(String),
    #[error("`{0}` is used before it is assigned and is not a symbolic input")]
    UseBeforeDef(String),
}

/// Parses, desugars and validates a complete program.
pub fn load_program(source: &str) -> Result<Program, LangError> {
    let program = parse_program(source)?;
    validate(&program)?;
    Ok(program)
}
