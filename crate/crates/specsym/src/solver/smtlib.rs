//! SMT-LIB 2 emission and response parsing for the external solver.
//!
//! Queries are QF_LIA scripts with one `declare-const` per symbol (sorted)
//! and one `assert` per conjunct, in conjunction order; the emitted bytes
//! are a pure function of the conjunction.

use crate::lang::RelOp;
use crate::symcore::{Constraint, Model};

use super::enumerate::conjunction_symbols;
use super::verdict::{SatStatus, SolverException};

/// Renders a conjunction as a complete SMT-LIB script ending in
/// `(check-sat)` and `(get-model)`.
pub fn emit_query(constraints: &[Constraint]) -> String {
    let mut out = String::from("(set-logic QF_LIA)\n");
    for symbol in conjunction_symbols(constraints) {
        out.push_str(&format!("(declare-const {symbol} Int)\n"));
    }
    if constraints.is_empty() {
        out.push_str("(assert true)\n");
    }
    for c in constraints {
        out.push_str(&format!("(assert {})\n", assert_term(c)));
    }
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

fn assert_term(c: &Constraint) -> String {
    let lhs = sum_term(c);
    let rhs = int_term(c.rhs);
    match c.rel {
        RelOp::Lt => format!("(< {lhs} {rhs})"),
        RelOp::Le => format!("(<= {lhs} {rhs})"),
        RelOp::Gt => format!("(> {lhs} {rhs})"),
        RelOp::Ge => format!("(>= {lhs} {rhs})"),
        RelOp::Eq => format!("(= {lhs} {rhs})"),
        RelOp::Ne => format!("(not (= {lhs} {rhs}))"),
    }
}

fn sum_term(c: &Constraint) -> String {
    let terms: Vec<String> = c
        .coeffs
        .iter()
        .map(|(name, &coeff)| {
            if coeff == 1 {
                name.clone()
            } else {
                format!("(* {} {name})", int_term(coeff))
            }
        })
        .collect();
    if terms.len() == 1 {
        terms.into_iter().next().unwrap()
    } else {
        format!("(+ {})", terms.join(" "))
    }
}

fn int_term(value: i128) -> String {
    if value < 0 {
        format!("(- {})", value.unsigned_abs())
    } else {
        value.to_string()
    }
}

/// Parses a solver's stdout: a `sat`/`unsat` status line, and on `sat` any
/// `(define-fun NAME () Int VALUE)` bindings found in the rest (symbols the
/// solver leaves out are unconstrained). `unknown` is reported as a
/// capacity exception, anything else as a protocol error.
pub fn parse_response(text: &str) -> Result<(SatStatus, Model), SolverException> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let status = match lines.next() {
        Some("sat") => SatStatus::Sat,
        Some("unsat") => return Ok((SatStatus::Unsat, Model::new())),
        Some("unknown") => {
            return Err(SolverException::Capacity("external solver returned unknown".into()))
        }
        Some(other) => {
            return Err(SolverException::Protocol(format!("unrecognized status line `{other}`")))
        }
        None => return Err(SolverException::Protocol("empty response".into())),
    };
    let rest: String = text.lines().skip_while(|l| l.trim() != "sat").skip(1).collect::<Vec<_>>().join(" ");
    Ok((status, parse_bindings(&rest)?))
}

fn parse_bindings(text: &str) -> Result<Model, SolverException> {
    let mut model = Model::new();
    let tokens = tokenize(text);
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i] == "define-fun" {
            // define-fun NAME ( ) Int VALUE
            let name = tokens
                .get(i + 1)
                .ok_or_else(|| SolverException::Protocol("truncated define-fun".into()))?;
            let mut j = i + 2;
            // Skip the (empty) argument list.
            if tokens.get(j).map(String::as_str) != Some("(") {
                return Err(SolverException::Protocol(format!(
                    "define-fun {name} with non-nullary arguments"
                )));
            }
            while j < tokens.len() && tokens[j] != ")" {
                j += 1;
            }
            j += 1; // past ")"
            if tokens.get(j).map(String::as_str) != Some("Int") {
                return Err(SolverException::Protocol(format!("define-fun {name} is not an Int")));
            }
            j += 1;
            let value = parse_value(&tokens, &mut j)?;
            model.insert(name.clone(), value);
            i = j;
        } else {
            i += 1;
        }
    }
    Ok(model)
}

/// Parses `N` or `(- N)` at `*pos`, advancing it.
fn parse_value(tokens: &[String], pos: &mut usize) -> Result<i64, SolverException> {
    let bad = |t: &str| SolverException::Protocol(format!("unparseable model value near `{t}`"));
    match tokens.get(*pos).map(String::as_str) {
        Some("(") => {
            if tokens.get(*pos + 1).map(String::as_str) != Some("-") {
                return Err(bad(tokens.get(*pos + 1).map_or("", |s| s)));
            }
            let n: i64 = tokens
                .get(*pos + 2)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad(tokens.get(*pos + 2).map_or("", |s| s)))?;
            if tokens.get(*pos + 3).map(String::as_str) != Some(")") {
                return Err(bad("missing )"));
            }
            *pos += 4;
            Ok(-n)
        }
        Some(tok) => {
            let n: i64 = tok.parse().map_err(|_| bad(tok))?;
            *pos += 1;
            Ok(n)
        }
        None => Err(bad("end of response")),
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
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
