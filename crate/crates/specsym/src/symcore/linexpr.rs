//! Linear integer expressions: `constant + Σ coeff·symbol`.

use std::collections::BTreeMap;
use std::fmt;

/// A linear form over symbolic integer inputs. The coefficient map never
/// stores zero coefficients, and symbols are kept in sorted order, so two
/// semantically equal forms are structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LinExpr {
    pub constant: i128,
    pub coeffs: BTreeMap<String, i128>,
}

impl LinExpr {
    pub fn constant(value: i128) -> LinExpr {
        LinExpr { constant: value, coeffs: BTreeMap::new() }
    }

    pub fn symbol(name: impl Into<String>) -> LinExpr {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), 1);
        LinExpr { constant: 0, coeffs }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The constant value, when the form has no symbolic part.
    pub fn as_constant(&self) -> Option<i128> {
        if self.is_constant() {
            Some(self.constant)
        } else {
            None
        }
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        out.constant += other.constant;
        for (name, coeff) in &other.coeffs {
            let entry = out.coeffs.entry(name.clone()).or_insert(0);
            *entry += coeff;
            if *entry == 0 {
                out.coeffs.remove(name);
            }
        }
        out
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, factor: i128) -> LinExpr {
        if factor == 0 {
            return LinExpr::constant(0);
        }
        LinExpr {
            constant: self.constant * factor,
            coeffs: self.coeffs.iter().map(|(n, c)| (n.clone(), c * factor)).collect(),
        }
    }

    pub fn neg(&self) -> LinExpr {
        self.scale(-1)
    }

    /// Evaluates the form under a concrete assignment. Symbols missing from
    /// the assignment evaluate as 0.
    pub fn eval(&self, assignment: &BTreeMap<String, i64>) -> i128 {
        let mut value = self.constant;
        for (name, coeff) in &self.coeffs {
            value += coeff * i128::from(assignment.get(name).copied().unwrap_or(0));
        }
        value
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, &coeff) in &self.coeffs {
            if first {
                if coeff == 1 {
                    write!(f, "{name}")?;
                } else if coeff == -1 {
                    write!(f, "-{name}")?;
                } else {
                    write!(f, "{coeff}*{name}")?;
                }
                first = false;
            } else if coeff < 0 {
                if coeff == -1 {
                    write!(f, " - {name}")?;
                } else {
                    write!(f, " - {}*{name}", -coeff)?;
                }
            } else if coeff == 1 {
                write!(f, " + {name}")?;
            } else {
                write!(f, " + {coeff}*{name}")?;
            }
        }
        if first {
            write!(f, "{}", self.constant)?;
        } else if self.constant < 0 {
            write!(f, " - {}", -self.constant)?;
        } else if self.constant > 0 {
            write!(f, " + {}", self.constant)?;
        }
        Ok(())
    }
}
