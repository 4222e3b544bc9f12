//! Normalized linear integer constraints.

use std::collections::BTreeMap;
use std::fmt;

use crate::lang::RelOp;

use super::linexpr::LinExpr;

/// A comparison `Σ coeff·symbol REL rhs` in normal form: symbols sorted,
/// coefficients gcd-reduced (with the right-hand constant rounded exactly
/// for the relation, so reduction never changes the integer solution set),
/// and equations/inequations sign-canonicalized so their leading
/// coefficient is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: BTreeMap<String, i128>,
    pub rel: RelOp,
    pub rhs: i128,
}

/// The result of normalizing a comparison: either a genuine symbolic
/// constraint or a comparison with no symbolic part, already decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized {
    Trivial(bool),
    Constraint(Constraint),
}

impl Constraint {
    /// Normalizes `lhs REL rhs` over linear forms.
    pub fn compare(lhs: &LinExpr, rel: RelOp, rhs: &LinExpr) -> Normalized {
        let diff = lhs.sub(rhs);
        // diff REL 0  ⟺  varpart REL -constant
        Constraint::normalize(diff.coeffs, rel, -diff.constant)
    }

    fn normalize(coeffs: BTreeMap<String, i128>, rel: RelOp, rhs: i128) -> Normalized {
        if coeffs.is_empty() {
            return Normalized::Trivial(holds(0, rel, rhs));
        }
        let g = coeffs.values().fold(0u128, |g, &c| gcd(g, c.unsigned_abs())) as i128;
        let coeffs: BTreeMap<String, i128> =
            coeffs.into_iter().map(|(n, c)| (n, c / g)).collect();
        // Divide the right-hand side exactly for the relation: over the
        // integers a·x ≤ c ⟺ (a/g)·x ≤ ⌊c/g⌋, a·x < c ⟺ (a/g)·x < ⌈c/g⌉,
        // and symmetrically for >, ≥; =/≠ require exact divisibility.
        let rhs = match rel {
            RelOp::Le | RelOp::Gt => rhs.div_euclid(g),
            RelOp::Lt | RelOp::Ge => div_ceil(rhs, g),
            RelOp::Eq => {
                if rhs % g != 0 {
                    return Normalized::Trivial(false);
                }
                rhs / g
            }
            RelOp::Ne => {
                if rhs % g != 0 {
                    return Normalized::Trivial(true);
                }
                rhs / g
            }
        };
        let mut c = Constraint { coeffs, rel, rhs };
        // x = y and y = x must normalize identically: fix the sign of the
        // leading coefficient for the symmetric relations.
        if c.rel.is_equation() && c.coeffs.values().next().copied().unwrap_or(0) < 0 {
            c = Constraint {
                coeffs: c.coeffs.into_iter().map(|(n, v)| (n, -v)).collect(),
                rel: c.rel,
                rhs: -c.rhs,
            };
        }
        Normalized::Constraint(c)
    }

    /// The exact logical complement, already in normal form.
    ///
    /// Normalization rounds the right-hand side with ⌊·⌋ for ≤ and > and
    /// ⌈·⌉ for < and ≥; complementary relations share a rounding mode, so
    /// complementing in normal form needs no re-normalization.
    pub fn complement(&self) -> Constraint {
        Constraint { coeffs: self.coeffs.clone(), rel: self.rel.complement(), rhs: self.rhs }
    }

    /// True for `==`/`!=` constraints, false for order constraints.
    pub fn is_equation(&self) -> bool {
        self.rel.is_equation()
    }

    /// All symbols mentioned, in sorted order.
    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(String::as_str)
    }

    /// Evaluates the constraint at a concrete assignment.
    pub fn holds_at(&self, assignment: &BTreeMap<String, i64>) -> bool {
        let lhs: i128 = self
            .coeffs
            .iter()
            .map(|(n, c)| c * i128::from(assignment.get(n).copied().unwrap_or(0)))
            .sum();
        holds(lhs, self.rel, self.rhs)
    }
}

fn holds(lhs: i128, rel: RelOp, rhs: i128) -> bool {
    match rel {
        RelOp::Lt => lhs < rhs,
        RelOp::Le => lhs <= rhs,
        RelOp::Gt => lhs > rhs,
        RelOp::Ge => lhs >= rhs,
        RelOp::Eq => lhs == rhs,
        RelOp::Ne => lhs != rhs,
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// ⌈a / b⌉ for b > 0.
fn div_ceil(a: i128, b: i128) -> i128 {
    -(-a).div_euclid(b)
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs = LinExpr { constant: 0, coeffs: self.coeffs.clone() };
        // Mathematical "=" rather than the source-level "==".
        let rel = if self.rel == RelOp::Eq { "=" } else { self.rel.symbol() };
        write!(f, "{} {} {}", lhs, rel, self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::{Constraint, Normalized};
    use crate::lang::RelOp;
    use crate::symcore::LinExpr;

    fn cmp(lhs: &LinExpr, rel: RelOp, rhs: &LinExpr) -> Constraint {
        match Constraint::compare(lhs, rel, rhs) {
            Normalized::Constraint(c) => c,
            Normalized::Trivial(b) => panic!("unexpectedly trivial ({b})"),
        }
    }

    #[test]
    fn moves_variables_left_and_constants_right() {
        // x + 1 < y  ⟹  x - y < -1
        let lhs = LinExpr::symbol("x").add(&LinExpr::constant(1));
        let rhs = LinExpr::symbol("y");
        let c = cmp(&lhs, RelOp::Lt, &rhs);
        assert_eq!(c.to_string(), "x - y < -1");
    }

    #[test]
    fn gcd_reduction_rounds_exactly_per_relation() {
        let two_x = LinExpr::symbol("x").scale(2);
        let three = LinExpr::constant(3);
        // 2x ≤ 3 ⟺ x ≤ 1, and 2x > 3 ⟺ x > 1 (shared floor)
        assert_eq!(cmp(&two_x, RelOp::Le, &three).to_string(), "x <= 1");
        assert_eq!(cmp(&two_x, RelOp::Gt, &three).to_string(), "x > 1");
        // 2x < 3 ⟺ x < 2, and 2x ≥ 3 ⟺ x ≥ 2 (shared ceiling)
        assert_eq!(cmp(&two_x, RelOp::Lt, &three).to_string(), "x < 2");
        assert_eq!(cmp(&two_x, RelOp::Ge, &three).to_string(), "x >= 2");
        // Negative constants round toward -∞ / +∞ correctly.
        let minus_three = LinExpr::constant(-3);
        assert_eq!(cmp(&two_x, RelOp::Le, &minus_three).to_string(), "x <= -2");
        assert_eq!(cmp(&two_x, RelOp::Ge, &minus_three).to_string(), "x >= -1");
    }

    #[test]
    fn unsolvable_equation_is_trivially_false() {
        let two_x = LinExpr::symbol("x").scale(2);
        let three = LinExpr::constant(3);
        assert_eq!(Constraint::compare(&two_x, RelOp::Eq, &three), Normalized::Trivial(false));
        assert_eq!(Constraint::compare(&two_x, RelOp::Ne, &three), Normalized::Trivial(true));
    }

    #[test]
    fn symmetric_relations_are_sign_canonical() {
        let x = LinExpr::symbol("x");
        let y = LinExpr::symbol("y");
        // x == y and y == x normalize identically.
        assert_eq!(cmp(&x, RelOp::Eq, &y), cmp(&y, RelOp::Eq, &x));
        assert_eq!(cmp(&x, RelOp::Eq, &y).to_string(), "x - y = 0");
    }

    #[test]
    fn variable_free_comparisons_are_trivial() {
        let two = LinExpr::constant(2);
        let three = LinExpr::constant(3);
        assert_eq!(Constraint::compare(&two, RelOp::Lt, &three), Normalized::Trivial(true));
        assert_eq!(Constraint::compare(&two, RelOp::Gt, &three), Normalized::Trivial(false));
        let x = LinExpr::symbol("x");
        assert_eq!(Constraint::compare(&x, RelOp::Le, &x), Normalized::Trivial(true));
    }

    #[test]
    fn complement_is_exact_and_normalized() {
        let samples = [
            (LinExpr::symbol("x").scale(2), RelOp::Le, LinExpr::constant(3)),
            (LinExpr::symbol("x").scale(2), RelOp::Lt, LinExpr::constant(-3)),
            (LinExpr::symbol("x").scale(3).add(&LinExpr::symbol("y").scale(-6)), RelOp::Ge, LinExpr::constant(4)),
            (LinExpr::symbol("x").neg(), RelOp::Eq, LinExpr::symbol("y")),
        ];
        for (lhs, rel, rhs) in samples {
            let c = cmp(&lhs, rel, &rhs);
            // Complementing the normalized form equals normalizing the
            // complemented source comparison.
            let direct = cmp(&lhs, rel.complement(), &rhs);
            assert_eq!(c.complement(), direct);
            assert_eq!(c.complement().complement(), c);
        }
    }

    #[test]
    fn holds_at_agrees_with_source_comparison() {
        let lhs = LinExpr::symbol("x").scale(2).add(&LinExpr::constant(1));
        let rhs = LinExpr::symbol("y").scale(-3);
        for rel in [RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge, RelOp::Eq, RelOp::Ne] {
            if let Normalized::Constraint(c) = Constraint::compare(&lhs, rel, &rhs) {
                for x in -4i64..=4 {
                    for y in -4i64..=4 {
                        let point: BTreeMap<String, i64> =
                            [("x".to_string(), x), ("y".to_string(), y)].into();
                        let want = {
                            let l = 2 * i128::from(x) + 1;
                            let r = -3 * i128::from(y);
                            match rel {
                                RelOp::Lt => l < r,
                                RelOp::Le => l <= r,
                                RelOp::Gt => l > r,
                                RelOp::Ge => l >= r,
                                RelOp::Eq => l == r,
                                RelOp::Ne => l != r,
                            }
                        };
                        assert_eq!(c.holds_at(&point), want, "{c} at x={x}, y={y}");
                    }
                }
            }
        }
    }
}
