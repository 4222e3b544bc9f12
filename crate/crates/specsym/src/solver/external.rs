//! Driving an external SMT-LIB solver process, one query per invocation.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use crate::symcore::Constraint;

use super::enumerate::{conjunction_symbols, satisfies};
use super::smtlib::{emit_query, parse_response};
use super::verdict::{SatStatus, Solver, SolverException, SolverVerdict};

/// A solver that shells out to an SMT-LIB 2 process (e.g. `z3 -in`) for
/// every query. Responses are treated as untrusted: `sat` models are
/// re-checked by substitution, and anything unparseable is an exception
/// rather than a verdict.
pub struct ExternalSolver {
    pub command: String,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl ExternalSolver {
    pub fn new(command: impl Into<String>, args: Vec<String>) -> ExternalSolver {
        ExternalSolver { command: command.into(), args, timeout: Duration::from_secs(5) }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> ExternalSolver {
        self.timeout = timeout;
        self
    }

    fn run_process(&self, query: &str) -> Result<String, SolverException> {
        let io_err = |e: std::io::Error| SolverException::Io(format!("{}: {e}", self.command));
        let mut child = Command::new(&self.command)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(io_err)?;
        child
            .stdin
            .take()
            .expect("stdin was piped")
            .write_all(query.as_bytes())
            .map_err(io_err)?;
        // Poll for exit so the child can be killed on timeout. Responses
        // are a handful of lines, far below pipe capacity, so the child
        // never blocks writing before it exits.
        let start = Instant::now();
        loop {
            match child.try_wait().map_err(io_err)? {
                Some(_) => break,
                None if start.elapsed() >= self.timeout => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(SolverException::Timeout(self.timeout));
                }
                None => std::thread::sleep(Duration::from_millis(5)),
            }
        }
        let mut out = String::new();
        child
            .stdout
            .take()
            .expect("stdout was piped")
            .read_to_string(&mut out)
            .map_err(io_err)?;
        Ok(out)
    }
}

impl Solver for ExternalSolver {
    fn solve(&mut self, constraints: &[Constraint]) -> Result<SolverVerdict, SolverException> {
        let start = Instant::now();
        let response = self.run_process(&emit_query(constraints))?;
        let (status, mut model) = parse_response(&response)?;
        let verdict = match status {
            SatStatus::Unsat => {
                SolverVerdict { status, model: None, elapsed: start.elapsed() }
            }
            SatStatus::Sat => {
                // Symbols the solver omitted are unconstrained; fix them at
                // 0, then insist the completed model really satisfies the
                // conjunction.
                for symbol in conjunction_symbols(constraints) {
                    model.entry(symbol).or_insert(0);
                }
                if !satisfies(constraints, &model) {
                    return Err(SolverException::Protocol(
                        "model from external solver fails substitution".into(),
                    ));
                }
                SolverVerdict { status, model: Some(model), elapsed: start.elapsed() }
            }
        };
        Ok(verdict)
    }

    fn name(&self) -> &'static str {
        "external"
    }
}
