//! Failure localization: given a conjunction known to be unsatisfiable,
//! find the first prefix length at which it becomes so, in logarithmically
//! many probe solves.

use crate::solver::SolverException;

/// The result of one localization episode over prefix lengths
/// `base+1 ..= failed_len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Localization {
    /// The smallest prefix length whose conjunction is unsatisfiable.
    /// Every strictly shorter prefix is satisfiable — and the one of
    /// length `first_bad - 1` has been *proven* so (by a probe, unless it
    /// is the already-proven base).
    pub first_bad: usize,
    /// Probe solves performed: at most ⌈log₂(failed_len − base)⌉.
    pub probes: u64,
}

/// Binary-searches for the first unsatisfiable prefix.
///
/// Preconditions: the prefix of length `base` is known satisfiable
/// (`base` may be 0: the empty conjunction) and the full conjunction of
/// length `failed_len > base` is known unsatisfiable. `probe(i)` must
/// decide the prefix of length `i`; it is only ever called with
/// `base < i < failed_len`, so the failing conjunction is never re-solved.
///
/// Because conjunctions only grow along a path, prefix satisfiability is
/// monotone: sat prefixes form an initial segment. That is what makes
/// bisection sound here.
pub fn localize(
    base: usize,
    failed_len: usize,
    mut probe: impl FnMut(usize) -> Result<bool, SolverException>,
) -> Result<Localization, SolverException> {
    assert!(failed_len > base, "failing conjunction must extend the trusted base");
    let mut lo = base + 1;
    let mut hi = failed_len - 1;
    let mut first_bad = failed_len;
    let mut probes = 0;
    while lo <= hi {
        let mid = lo + (hi - lo) / 2;
        probes += 1;
        if probe(mid)? {
            lo = mid + 1;
        } else {
            first_bad = mid;
            hi = mid - 1;
        }
    }
    // lo only ever advances past proven-sat prefixes, and ends at
    // first_bad, so the prefix of length first_bad - 1 is proven.
    debug_assert_eq!(lo, first_bad);
    Ok(Localization { first_bad, probes })
}

/// ⌈log₂ n⌉ for n ≥ 1: the probe budget for a segment of n candidates.
pub fn probe_budget(n: usize) -> u64 {
    debug_assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as u64
}
