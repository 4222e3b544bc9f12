//! Recursive-descent parser plus the division-hoisting pass.
//!
//! After parsing, every division is hoisted into its own assignment
//! statement (`__q0 = a / b;`), so later phases only ever see a division as
//! the entire right-hand side of an assignment. Divisions inside a `while`
//! condition are re-evaluated by repeating the hoisted assignments at the
//! end of the loop body.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{Block, Cond, Expr, Program, RelOp, Stmt};
use super::lexer::{lex, LexError, Span, Token, TokenKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("unexpected token at {span}: expected {expected}, found {found}")]
    UnexpectedToken { span: Span, expected: String, found: String },
    #[error("unexpected end of input: expected {expected}")]
    UnexpectedEof { expected: String },
    #[error("multiplication of two symbolic expressions at {span} (one operand must be an integer literal)")]
    SymbolicMultiplication { span: Span },
    #[error("integer literal out of range at {span}")]
    IntOutOfRange { span: Span },
}

pub type ParseResult<T> = Result<T, ParseError>;

/// Parses source text into a validated-shape `Program` (divisions hoisted).
pub fn parse_program(source: &str) -> ParseResult<Program> {
    let tokens = lex(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let program = parser.program()?;
    Ok(hoist_divisions(program))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_span(&self) -> Option<Span> {
        self.tokens.get(self.pos).map(|t| t.span)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: &TokenKind, expected: &str) -> ParseResult<Token> {
        match self.advance() {
            Some(t) if t.kind == *kind => Ok(t),
            Some(t) => Err(ParseError::UnexpectedToken {
                span: t.span,
                expected: expected.to_string(),
                found: t.kind.describe(),
            }),
            None => Err(ParseError::UnexpectedEof { expected: expected.to_string() }),
        }
    }

    fn unexpected<T>(&mut self, expected: &str) -> ParseResult<T> {
        match self.advance() {
            Some(t) => Err(ParseError::UnexpectedToken {
                span: t.span,
                expected: expected.to_string(),
                found: t.kind.describe(),
            }),
            None => Err(ParseError::UnexpectedEof { expected: expected.to_string() }),
        }
    }

    fn ident(&mut self) -> ParseResult<String> {
        match self.advance() {
            Some(Token { kind: TokenKind::Ident(name), .. }) => Ok(name),
            Some(t) => Err(ParseError::UnexpectedToken {
                span: t.span,
                expected: "identifier".to_string(),
                found: t.kind.describe(),
            }),
            None => Err(ParseError::UnexpectedEof { expected: "identifier".to_string() }),
        }
    }

    fn program(&mut self) -> ParseResult<Program> {
        let mut sym_inputs = Vec::new();
        while self.peek() == Some(&TokenKind::KwSym) {
            self.advance();
            self.expect(&TokenKind::KwInt, "`int`")?;
            sym_inputs.push(self.ident()?);
            self.expect(&TokenKind::Semi, "`;`")?;
        }
        let mut body = Vec::new();
        while self.peek().is_some() {
            body.push(self.stmt()?);
        }
        Ok(Program { sym_inputs, body })
    }

    fn block(&mut self) -> ParseResult<Block> {
        self.expect(&TokenKind::LBrace, "`{`")?;
        let mut stmts = Vec::new();
        while self.peek() != Some(&TokenKind::RBrace) {
            if self.peek().is_none() {
                return Err(ParseError::UnexpectedEof { expected: "`}`".to_string() });
            }
            stmts.push(self.stmt()?);
        }
        self.advance();
        Ok(stmts)
    }

    fn stmt(&mut self) -> ParseResult<Stmt> {
        match self.peek() {
            Some(TokenKind::Ident(_)) => {
                let name = self.ident()?;
                self.expect(&TokenKind::Assign, "`=`")?;
                let value = self.expr()?;
                self.expect(&TokenKind::Semi, "`;`")?;
                Ok(Stmt::Assign { name, value })
            }
            Some(TokenKind::KwIf) => {
                self.advance();
                self.expect(&TokenKind::LParen, "`(`")?;
                let cond = self.cond()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                let then_block = self.block()?;
                let else_block = if self.peek() == Some(&TokenKind::KwElse) {
                    self.advance();
                    self.block()?
                } else {
                    Vec::new()
                };
                Ok(Stmt::If { cond, then_block, else_block })
            }
            Some(TokenKind::KwWhile) => {
                self.advance();
                self.expect(&TokenKind::LParen, "`(`")?;
                let cond = self.cond()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                let body = self.block()?;
                Ok(Stmt::While { cond, body })
            }
            Some(TokenKind::KwAssert) => {
                self.advance();
                self.expect(&TokenKind::LParen, "`(`")?;
                let cond = self.cond()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                self.expect(&TokenKind::Semi, "`;`")?;
                Ok(Stmt::Assert { cond })
            }
            Some(TokenKind::KwError) => {
                self.advance();
                self.expect(&TokenKind::LParen, "`(`")?;
                let message = match self.advance() {
                    Some(Token { kind: TokenKind::Str(s), .. }) => s,
                    Some(t) => {
                        return Err(ParseError::UnexpectedToken {
                            span: t.span,
                            expected: "string literal".to_string(),
                            found: t.kind.describe(),
                        })
                    }
                    None => {
                        return Err(ParseError::UnexpectedEof {
                            expected: "string literal".to_string(),
                        })
                    }
                };
                self.expect(&TokenKind::RParen, "`)`")?;
                self.expect(&TokenKind::Semi, "`;`")?;
                Ok(Stmt::Error { message })
            }
            Some(TokenKind::KwPrint) => {
                self.advance();
                self.expect(&TokenKind::LParen, "`(`")?;
                let value = self.expr()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                self.expect(&TokenKind::Semi, "`;`")?;
                Ok(Stmt::Print { value })
            }
            _ => self.unexpected("a statement"),
        }
    }

    fn cond(&mut self) -> ParseResult<Cond> {
        if self.peek() == Some(&TokenKind::Bang) {
            self.advance();
            self.expect(&TokenKind::LParen, "`(`")?;
            let inner = self.cond()?;
            self.expect(&TokenKind::RParen, "`)`")?;
            return Ok(inner.negate());
        }
        let lhs = self.expr()?;
        let op = match self.advance() {
            Some(Token { kind: TokenKind::Lt, .. }) => RelOp::Lt,
            Some(Token { kind: TokenKind::Le, .. }) => RelOp::Le,
            Some(Token { kind: TokenKind::Gt, .. }) => RelOp::Gt,
            Some(Token { kind: TokenKind::Ge, .. }) => RelOp::Ge,
            Some(Token { kind: TokenKind::EqEq, .. }) => RelOp::Eq,
            Some(Token { kind: TokenKind::Ne, .. }) => RelOp::Ne,
            Some(t) => {
                return Err(ParseError::UnexpectedToken {
                    span: t.span,
                    expected: "a relational operator".to_string(),
                    found: t.kind.describe(),
                })
            }
            None => {
                return Err(ParseError::UnexpectedEof {
                    expected: "a relational operator".to_string(),
                })
            }
        };
        let rhs = self.expr()?;
        Ok(Cond { lhs, op, rhs })
    }

    fn expr(&mut self) -> ParseResult<Expr> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Some(TokenKind::Plus) => {
                    self.advance();
                    e = Expr::Add(Box::new(e), Box::new(self.term()?));
                }
                Some(TokenKind::Minus) => {
                    self.advance();
                    e = Expr::Sub(Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> ParseResult<Expr> {
        let mut e = self.factor()?;
        loop {
            match self.peek() {
                Some(TokenKind::Star) => {
                    let span = self.peek_span().unwrap();
                    self.advance();
                    let rhs = self.factor()?;
                    if !e.is_literal() && !rhs.is_literal() {
                        return Err(ParseError::SymbolicMultiplication { span });
                    }
                    e = Expr::Mul(Box::new(e), Box::new(rhs));
                }
                Some(TokenKind::Slash) => {
                    self.advance();
                    e = Expr::Div(Box::new(e), Box::new(self.factor()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn factor(&mut self) -> ParseResult<Expr> {
        match self.advance() {
            Some(Token { kind: TokenKind::Int(n), .. }) => Ok(Expr::Int(n)),
            Some(Token { kind: TokenKind::Ident(name), .. }) => Ok(Expr::Var(name)),
            Some(Token { kind: TokenKind::Minus, span }) => {
                let inner = self.factor()?;
                // Fold a negated literal so `-5` parses as the literal -5.
                match inner {
                    Expr::Int(n) => n
                        .checked_neg()
                        .map(Expr::Int)
                        .ok_or(ParseError::IntOutOfRange { span }),
                    other => Ok(Expr::Neg(Box::new(other))),
                }
            }
            Some(Token { kind: TokenKind::LParen, .. }) => {
                let e = self.expr()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                Ok(e)
            }
            Some(t) => Err(ParseError::UnexpectedToken {
                span: t.span,
                expected: "an expression".to_string(),
                found: t.kind.describe(),
            }),
            None => Err(ParseError::UnexpectedEof { expected: "an expression".to_string() }),
        }
    }
}

/// Rewrites a program so every division is the entire right-hand side of an
/// assignment. Idempotent: hoisting an already-hoisted program is a no-op.
fn hoist_divisions(program: Program) -> Program {
    let mut namer = TempNamer::new(&program);
    let body = hoist_block(program.body, &mut namer);
    Program { sym_inputs: program.sym_inputs, body }
}

struct TempNamer {
    taken: BTreeSet<String>,
    next: usize,
}

impl TempNamer {
    fn new(program: &Program) -> TempNamer {
        let mut taken: BTreeSet<String> =
            program.sym_inputs.iter().cloned().collect();
        collect_names(&program.body, &mut taken);
        TempNamer { taken, next: 0 }
    }

    fn fresh(&mut self) -> String {
        loop {
            let name = format!("__q{}", self.next);
            self.next += 1;
            if !self.taken.contains(&name) {
                self.taken.insert(name.clone());
                return name;
            }
        }
    }
}

fn collect_names(block: &Block, out: &mut BTreeSet<String>) {
    for stmt in block {
        match stmt {
            Stmt::Assign { name, .. } => {
                out.insert(name.clone());
            }
            Stmt::If { then_block, else_block, .. } => {
                collect_names(then_block, out);
                collect_names(else_block, out);
            }
            Stmt::While { body, .. } => collect_names(body, out),
            _ => {}
        }
    }
}

fn hoist_block(block: Block, namer: &mut TempNamer) -> Block {
    let mut out = Vec::new();
    for stmt in block {
        match stmt {
            Stmt::Assign { name, value } => {
                // A bare division on the right-hand side is the canonical
                // hoisted form; only its operands need rewriting.
                let value = match value {
                    Expr::Div(num, den) => Expr::Div(
                        Box::new(hoist_expr(*num, namer, &mut out)),
                        Box::new(hoist_expr(*den, namer, &mut out)),
                    ),
                    other => hoist_expr(other, namer, &mut out),
                };
                out.push(Stmt::Assign { name, value });
            }
            Stmt::If { cond, then_block, else_block } => {
                let cond = hoist_cond(cond, namer, &mut out);
                out.push(Stmt::If {
                    cond,
                    then_block: hoist_block(then_block, namer),
                    else_block: hoist_block(else_block, namer),
                });
            }
            Stmt::While { cond, body } => {
                let mut pre = Vec::new();
                let cond = hoist_cond(cond, namer, &mut pre);
                let mut body = hoist_block(body, namer);
                // Re-evaluate hoisted condition divisions on every iteration.
                body.extend(pre.iter().cloned());
                out.extend(pre);
                out.push(Stmt::While { cond, body });
            }
            Stmt::Assert { cond } => {
                let cond = hoist_cond(cond, namer, &mut out);
                out.push(Stmt::Assert { cond });
            }
            Stmt::Print { value } => {
                let value = hoist_expr(value, namer, &mut out);
                out.push(Stmt::Print { value });
            }
            Stmt::Error { message } => out.push(Stmt::Error { message }),
        }
    }
    out
}

fn hoist_cond(cond: Cond, namer: &mut TempNamer, out: &mut Vec<Stmt>) -> Cond {
    Cond {
        lhs: hoist_expr(cond.lhs, namer, out),
        op: cond.op,
        rhs: hoist_expr(cond.rhs, namer, out),
    }
}

fn hoist_expr(expr: Expr, namer: &mut TempNamer, out: &mut Vec<Stmt>) -> Expr {
    match expr {
        Expr::Int(_) | Expr::Var(_) => expr,
        Expr::Neg(e) => Expr::Neg(Box::new(hoist_expr(*e, namer, out))),
        Expr::Add(a, b) => Expr::Add(
            Box::new(hoist_expr(*a, namer, out)),
            Box::new(hoist_expr(*b, namer, out)),
        ),
        Expr::Sub(a, b) => Expr::Sub(
            Box::new(hoist_expr(*a, namer, out)),
            Box::new(hoist_expr(*b, namer, out)),
        ),
        Expr::Mul(a, b) => Expr::Mul(
            Box::new(hoist_expr(*a, namer, out)),
            Box::new(hoist_expr(*b, namer, out)),
        ),
        Expr::Div(a, b) => {
            let a = hoist_expr(*a, namer, out);
            let b = hoist_expr(*b, namer, out);
            let temp = namer.fresh();
            out.push(Stmt::Assign {
                name: temp.clone(),
                value: Expr::Div(Box::new(a), Box::new(b)),
            });
            Expr::Var(temp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::ast::{Cond, Expr, RelOp, Stmt};
    use super::super::pretty_print;
    use super::{parse_program, ParseError};

    fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    #[test]
    fn declarations_then_statements() {
        let p = parse_program("sym int x; sym int y; s = x + y;").unwrap();
        assert_eq!(p.sym_inputs, vec!["x", "y"]);
        assert_eq!(p.body.len(), 1);
    }

    #[test]
    fn negation_folds_into_complemented_comparison() {
        let p = parse_program("sym int x; if (!(x < 0)) { y = 1; }").unwrap();
        let Stmt::If { cond, .. } = &p.body[0] else { panic!("expected if") };
        assert_eq!(cond, &Cond { lhs: var("x"), op: RelOp::Ge, rhs: Expr::Int(0) });
    }

    #[test]
    fn double_negation_is_identity() {
        let a = parse_program("sym int x; if (!(!(x == 3))) { y = 1; }").unwrap();
        let b = parse_program("sym int x; if (x == 3) { y = 1; }").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unary_minus_on_literal_folds() {
        let p = parse_program("y = -5;").unwrap();
        assert_eq!(p.body[0], Stmt::Assign { name: "y".into(), value: Expr::Int(-5) });
    }

    #[test]
    fn symbolic_times_literal_is_allowed_either_side() {
        assert!(parse_program("sym int x; y = 3 * x;").is_ok());
        assert!(parse_program("sym int x; y = x * 3;").is_ok());
        assert!(parse_program("sym int x; y = -2 * x;").is_ok());
    }

    #[test]
    fn symbolic_times_symbolic_is_rejected() {
        let err = parse_program("sym int x; sym int y; z = x * y;").unwrap_err();
        assert!(matches!(err, ParseError::SymbolicMultiplication { .. }));
        let err = parse_program("sym int x; z = x * (2 + 1);").unwrap_err();
        assert!(matches!(err, ParseError::SymbolicMultiplication { .. }));
    }

    #[test]
    fn precedence_and_associativity() {
        let p = parse_program("sym int x; y = 1 + 2 * x - 3;").unwrap();
        let Stmt::Assign { value, .. } = &p.body[0] else { panic!() };
        // ((1 + 2*x) - 3)
        let expected = Expr::Sub(
            Box::new(Expr::Add(
                Box::new(Expr::Int(1)),
                Box::new(Expr::Mul(Box::new(Expr::Int(2)), Box::new(var("x")))),
            )),
            Box::new(Expr::Int(3)),
        );
        assert_eq!(value, &expected);
    }

    #[test]
    fn division_in_expression_is_hoisted_to_own_assignment() {
        let p = parse_program("sym int a; sym int b; s = a / b + 1;").unwrap();
        assert_eq!(
            pretty_print(&p),
            "sym int a;\nsym int b;\n__q0 = a / b;\ns = __q0 + 1;\n"
        );
    }

    #[test]
    fn division_at_assignment_root_is_left_alone() {
        let p = parse_program("sym int a; sym int b; q = a / b;").unwrap();
        assert_eq!(pretty_print(&p), "sym int a;\nsym int b;\nq = a / b;\n");
    }

    #[test]
    fn nested_divisions_hoist_innermost_first() {
        let p = parse_program("sym int a; sym int b; sym int c; q = a / (b / c);").unwrap();
        assert_eq!(
            pretty_print(&p),
            "sym int a;\nsym int b;\nsym int c;\n__q0 = b / c;\nq = a / __q0;\n"
        );
    }

    #[test]
    fn division_in_condition_is_hoisted_before_the_statement() {
        let p = parse_program("sym int a; sym int b; if (a / b > 1) { y = 1; }").unwrap();
        assert_eq!(
            pretty_print(&p),
            "sym int a;\nsym int b;\n__q0 = a / b;\nif (__q0 > 1) {\n  y = 1;\n}\n"
        );
    }

    #[test]
    fn division_in_while_condition_is_reevaluated_each_iteration() {
        let p =
            parse_program("sym int a; sym int b; while (a / b > 0) { a = a - 1; }").unwrap();
        assert_eq!(
            pretty_print(&p),
            "sym int a;\nsym int b;\n__q0 = a / b;\nwhile (__q0 > 0) {\n  a = a - 1;\n  __q0 = a / b;\n}\n"
        );
    }

    #[test]
    fn hoisting_is_idempotent() {
        let sources = [
            "sym int a; sym int b; q = a / b;",
            "sym int a; sym int b; s = a / b + b / a;",
            "sym int a; sym int b; while (a / b > 0) { a = a - a / 2; }",
        ];
        for src in sources {
            let once = parse_program(src).unwrap();
            let twice = parse_program(&pretty_print(&once)).unwrap();
            assert_eq!(once, twice, "hoisting changed a hoisted program: {src}");
        }
    }

    #[test]
    fn temp_namer_skips_taken_names() {
        let p = parse_program("sym int a; __q0 = 7; s = a / 2 + 1;").unwrap();
        assert_eq!(
            pretty_print(&p),
            "sym int a;\n__q0 = 7;\n__q1 = a / 2;\ns = __q1 + 1;\n"
        );
    }

    #[test]
    fn error_statement_takes_a_string() {
        let p = parse_program("sym int x; if (x > 0) { error(\"boom\"); }").unwrap();
        let Stmt::If { then_block, .. } = &p.body[0] else { panic!() };
        assert_eq!(then_block[0], Stmt::Error { message: "boom".into() });
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_program("sym int x;\ny = ;").unwrap_err();
        assert_eq!(
            err.to_string(),
            "unexpected token at 2:5: expected an expression, found `;`"
        );
    }
}
