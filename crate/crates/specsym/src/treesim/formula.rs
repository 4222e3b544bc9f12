//! The closed-form invocation count claimed for speculative search over a
//! full feasible binary tree.

/// Claimed number of probes for a full binary tree of height `n` under
/// speculation depth `k`: `2^n` when `n <= k`, otherwise
/// `2^n + (2^n - 2^(n mod k)) / (2^k - 1)`. The quotient is provably
/// integral (`2^k - 1` divides `2^(qk) - 1`); this is asserted, along
/// with an `n <= 30` overflow guard.
pub fn eq1_formula(n: u32, k: u32) -> u64 {
    assert!(n >= 1, "height must be at least 1");
    assert!(k >= 1, "speculation depth must be at least 1");
    assert!(n <= 30, "counts above height 30 would not fit comfortably");
    let two_n = 1u64 << n;
    if n <= k {
        return two_n;
    }
    let numerator = two_n - (1u64 << (n % k));
    let denominator = (1u64 << k) - 1;
    assert_eq!(numerator % denominator, 0, "closed-form quotient must be integral");
    two_n + numerator / denominator
}
