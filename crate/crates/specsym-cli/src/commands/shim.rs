//! `smt-shim`: a minimal SMT-LIB 2 solver process over stdin/stdout.
//!
//! The engine's external-solver client shells out to a fresh process per
//! query, writes a QF_LIA script, and parses `sat`/`unsat`/`unknown` plus
//! `define-fun` model bindings back. This subcommand implements exactly
//! that contract on top of the built-in decision procedure, so the client
//! can be exercised end to end on machines without a real SMT solver —
//! and be injected with failures on demand.

use std::io::Read;

use anyhow::Result;
use clap::Args;

use specsym::lang::RelOp;
use specsym::solver::{BuiltinSolver, SatStatus, Solver};
use specsym::symcore::{Constraint, LinExpr, Model, Normalized};

use super::usage;
use crate::EXIT_OK;

#[derive(Debug, Args)]
pub struct ShimArgs {
    /// Box bounds `LO:HI` every declared symbol ranges over.
    #[arg(long, default_value = "-64:63")]
    pub domain: String,
    /// Respond `unknown` when the query contains this substring.
    #[arg(long)]
    pub unknown_if: Option<String>,
    /// Respond with an unparseable line when the query contains this
    /// substring (exercises the client's protocol-error path).
    #[arg(long)]
    pub garbage_if: Option<String>,
    /// Sleep this long before answering (exercises the client's timeout).
    #[arg(long, default_value_t = 0)]
    pub sleep_ms: u64,
}

pub fn execute(args: ShimArgs) -> Result<i32> {
    let (lo, hi) = parse_domain(&args.domain)?;
    let mut query = String::new();
    std::io::stdin().read_to_string(&mut query)?;

    if args.sleep_ms > 0 {
        std::thread::sleep(std::time::Duration::from_millis(args.sleep_ms));
    }
    if args.garbage_if.as_deref().is_some_and(|s| query.contains(s)) {
        println!("carrier lost");
        return Ok(EXIT_OK);
    }
    if args.unknown_if.as_deref().is_some_and(|s| query.contains(s)) {
        println!("unknown");
        return Ok(EXIT_OK);
    }

    match answer(&query, lo, hi) {
        Ok(response) => print!("{response}"),
        // A malformed script (or an internal failure) must still produce
        // *something* the client maps to an exception, never a verdict.
        Err(err) => println!("(error \"{err}\")"),
    }
    Ok(EXIT_OK)
}

fn parse_domain(text: &str) -> Result<(i64, i64)> {
    let parse = || -> Option<(i64, i64)> {
        let (lo, hi) = text.split_once(':')?;
        let lo: i64 = lo.trim().parse().ok()?;
        let hi: i64 = hi.trim().parse().ok()?;
        (lo <= hi).then_some((lo, hi))
    };
    parse().ok_or_else(|| usage(format!("--domain expects `LO:HI` with LO <= HI, got `{text}`")))
}

fn answer(query: &str, lo: i64, hi: i64) -> Result<String, String> {
    let script = parse_script(query)?;
    if script.trivially_unsat {
        return Ok("unsat\n".to_string());
    }
    let mut solver = BuiltinSolver::with_domain(lo, hi);
    let verdict = solver.solve(&script.constraints).map_err(|e| e.to_string())?;
    match verdict.status {
        SatStatus::Unsat => Ok("unsat\n".to_string()),
        SatStatus::Sat => {
            let mut model = verdict.model.unwrap_or_default();
            // Declared symbols absent from every constraint are still fair
            // game for (get-model): bind them arbitrarily in range.
            for name in &script.symbols {
                model.entry(name.clone()).or_insert(lo.max(0).min(hi));
            }
            Ok(render_sat(&model))
        }
    }
}

fn render_sat(model: &Model) -> String {
    let mut out = String::from("sat\n(model\n");
    for (name, value) in model {
        let rendered = if *value < 0 {
            format!("(- {})", value.unsigned_abs())
        } else {
            value.to_string()
        };
        out.push_str(&format!("  (define-fun {name} () Int {rendered})\n"));
    }
    out.push_str(")\n");
    out
}

/// A parsed query: the declared symbols and the asserted conjunction.
struct Script {
    symbols: Vec<String>,
    constraints: Vec<Constraint>,
    /// Some assertion normalized to a constant `false`.
    trivially_unsat: bool,
}

fn parse_script(text: &str) -> Result<Script, String> {
    let forms = parse_forms(text)?;
    let mut script =
        Script { symbols: Vec::new(), constraints: Vec::new(), trivially_unsat: false };
    for form in &forms {
        let SExp::List(items) = form else {
            return Err(format!("stray atom `{form}` at the top level"));
        };
        match items.first() {
            Some(SExp::Atom(head)) => match head.as_str() {
                "set-logic" | "check-sat" | "get-model" | "exit" => {}
                "declare-const" => {
                    let [_, SExp::Atom(name), SExp::Atom(sort)] = items.as_slice() else {
                        return Err(format!("malformed declare-const: {form}"));
                    };
                    if sort != "Int" {
                        return Err(format!("unsupported sort `{sort}`"));
                    }
                    script.symbols.push(name.clone());
                }
                "assert" => {
                    let [_, term] = items.as_slice() else {
                        return Err(format!("malformed assert: {form}"));
                    };
                    match parse_condition(term)? {
                        Normalized::Trivial(true) => {}
                        Normalized::Trivial(false) => script.trivially_unsat = true,
                        Normalized::Constraint(c) => script.constraints.push(c),
                    }
                }
                other => return Err(format!("unsupported command `{other}`")),
            },
            _ => return Err(format!("malformed form: {form}")),
        }
    }
    Ok(script)
}

/// A boolean term: a relation, its negation, or a constant.
fn parse_condition(term: &SExp) -> Result<Normalized, String> {
    match term {
        SExp::Atom(a) if a == "true" => Ok(Normalized::Trivial(true)),
        SExp::Atom(a) if a == "false" => Ok(Normalized::Trivial(false)),
        SExp::Atom(a) => Err(format!("expected a boolean term, got `{a}`")),
        SExp::List(items) => {
            let Some(SExp::Atom(head)) = items.first() else {
                return Err(format!("expected an operator, got `{term}`"));
            };
            if head == "not" {
                let [_, inner] = items.as_slice() else {
                    return Err(format!("malformed not: {term}"));
                };
                return Ok(match parse_condition(inner)? {
                    Normalized::Trivial(t) => Normalized::Trivial(!t),
                    Normalized::Constraint(c) => Normalized::Constraint(c.complement()),
                });
            }
            let rel = match head.as_str() {
                "<" => RelOp::Lt,
                "<=" => RelOp::Le,
                ">" => RelOp::Gt,
                ">=" => RelOp::Ge,
                "=" => RelOp::Eq,
                other => return Err(format!("unsupported relation `{other}`")),
            };
            let [_, lhs, rhs] = items.as_slice() else {
                return Err(format!("relation `{head}` needs exactly two operands: {term}"));
            };
            Ok(Constraint::compare(&parse_term(lhs)?, rel, &parse_term(rhs)?))
        }
    }
}

/// An integer term: a literal, a symbol, or `+`/`-`/`*` over terms.
fn parse_term(term: &SExp) -> Result<LinExpr, String> {
    match term {
        SExp::Atom(a) => {
            if let Ok(n) = a.parse::<i128>() {
                Ok(LinExpr::constant(n))
            } else {
                Ok(LinExpr::symbol(a.clone()))
            }
        }
        SExp::List(items) => {
            let Some(SExp::Atom(head)) = items.first() else {
                return Err(format!("expected an arithmetic operator: {term}"));
            };
            let operands: Result<Vec<LinExpr>, String> =
                items[1..].iter().map(parse_term).collect();
            let operands = operands?;
            match (head.as_str(), operands.as_slice()) {
                ("+", [first, rest @ ..]) => {
                    Ok(rest.iter().fold(first.clone(), |acc, t| acc.add(t)))
                }
                ("-", [only]) => Ok(only.neg()),
                ("-", [first, rest @ ..]) => {
                    Ok(rest.iter().fold(first.clone(), |acc, t| acc.sub(t)))
                }
                ("*", [a, b]) => match (a.as_constant(), b.as_constant()) {
                    (Some(k), _) => Ok(b.scale(k)),
                    (_, Some(k)) => Ok(a.scale(k)),
                    (None, None) => Err(format!("nonlinear product: {term}")),
                },
                (op, _) => Err(format!("unsupported arithmetic `{op}` with {} operand(s)", operands.len())),
            }
        }
    }
}

enum SExp {
    Atom(String),
    List(Vec<SExp>),
}

impl std::fmt::Display for SExp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SExp::Atom(a) => f.write_str(a),
            SExp::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn parse_forms(text: &str) -> Result<Vec<SExp>, String> {
    let tokens = tokenize(text);
    let mut pos = 0;
    let mut forms = Vec::new();
    while pos < tokens.len() {
        forms.push(parse_sexp(&tokens, &mut pos)?);
    }
    Ok(forms)
}

fn parse_sexp(tokens: &[String], pos: &mut usize) -> Result<SExp, String> {
    match tokens.get(*pos).map(String::as_str) {
        None => Err("unexpected end of script".to_string()),
        Some(")") => Err("unbalanced `)`".to_string()),
        Some("(") => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    None => return Err("unterminated `(`".to_string()),
                    Some(")") => {
                        *pos += 1;
                        return Ok(SExp::List(items));
                    }
                    Some(_) => items.push(parse_sexp(tokens, pos)?),
                }
            }
        }
        Some(atom) => {
            *pos += 1;
            Ok(SExp::Atom(atom.to_string()))
        }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    let mut chars = text.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            ';' => {
                // Comment to end of line.
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}
