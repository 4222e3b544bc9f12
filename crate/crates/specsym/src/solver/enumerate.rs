//! Brute-force enumeration over a box domain: the reference oracle the
//! real solvers are tested against.

use std::collections::BTreeSet;

use crate::symcore::{Constraint, Model};

/// Collects the symbols of a conjunction in sorted order.
pub fn conjunction_symbols(constraints: &[Constraint]) -> Vec<String> {
    let set: BTreeSet<&str> = constraints.iter().flat_map(Constraint::symbols).collect();
    set.into_iter().map(str::to_string).collect()
}

/// Checks a full assignment against every conjunct.
pub fn satisfies(constraints: &[Constraint], model: &Model) -> bool {
    constraints.iter().all(|c| c.holds_at(model))
}

/// Decides a conjunction by exhaustive enumeration of `[lo, hi]^n`,
/// returning the lexicographically first satisfying assignment (ordered by
/// sorted symbol name, then value). Exponential; for tests and tiny domains
/// only.
pub fn enumerate_solve(constraints: &[Constraint], lo: i64, hi: i64) -> Option<Model> {
    assert!(lo <= hi, "empty enumeration domain");
    let symbols = conjunction_symbols(constraints);
    let mut model: Model = symbols.iter().map(|s| (s.clone(), lo)).collect();
    loop {
        if satisfies(constraints, &model) {
            return Some(model);
        }
        // Advance the odometer, least-significant symbol last.
        let mut pos = symbols.len();
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            let v = model.get_mut(&symbols[pos]).unwrap();
            if *v < hi {
                *v += 1;
                break;
            }
            *v = lo;
        }
    }
}
