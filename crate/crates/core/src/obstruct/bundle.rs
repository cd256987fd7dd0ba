use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::ring::SquareFreeClass;
use crate::error::{Error, Result};

/// Formal sum of line bundles over `(S²)^m`.
///
/// Each summand is given by its Euler vector `c`: the line bundle with first
/// Chern class `Σ cᵢ αᵢ`. The Bott line over the `i`-th sphere is the unit
/// vector `eᵢ`, and tensor products of lines add their vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleExpr {
    pub variable_count: usize,
    pub line_summands: Vec<Vec<i64>>,
}

impl BundleExpr {
    pub fn new(variable_count: usize, line_summands: Vec<Vec<i64>>) -> Result<Self> {
        let b = BundleExpr {
            variable_count,
            line_summands,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        SquareFreeClass::zero(self.variable_count)?;
        if self.line_summands.is_empty() {
            return Err(Error::invalid("line_summands", "bundle needs at least one summand"));
        }
        if let Some(i) = self.line_summands.iter().position(|c| c.len() != self.variable_count) {
            return Err(Error::invalid(
                format!("line_summands[{i}]"),
                format!("expected {} entries", self.variable_count),
            ));
        }
        Ok(())
    }

    /// Trivial bundle of the given rank.
    pub fn trivial(variable_count: usize, rank: usize) -> Result<Self> {
        Self::new(variable_count, vec![vec![0; variable_count]; rank])
    }

    /// Bott line pulled back from sphere `i` (0-based).
    pub fn bott(variable_count: usize, i: usize) -> Result<Self> {
        if i >= variable_count {
            return Err(Error::invalid("sphere", format!("sphere {i} out of range")));
        }
        let mut c = vec![0; variable_count];
        c[i] = 1;
        Self::new(variable_count, vec![c])
    }

    /// `P^{⊗k}` over `(S²)^k`: external tensor product of Bott lines.
    pub fn bott_power(k: usize) -> Result<Self> {
        Self::new(k, vec![vec![1; k]])
    }

    pub fn rank(&self) -> usize {
        self.line_summands.len()
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.variable_count != other.variable_count {
            return Err(Error::invalid("variable_count", "bundles live over different spaces"));
        }
        let mut s = self.line_summands.clone();
        s.extend(other.line_summands.iter().cloned());
        Self::new(self.variable_count, s)
    }

    /// `b^{⊕n}`.
    pub fn repeat(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "multiplicity must be positive"));
        }
        let s = (0..n).flat_map(|_| self.line_summands.iter().cloned()).collect();
        Self::new(self.variable_count, s)
    }

    /// Tensor product, summand by summand.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.variable_count != other.variable_count {
            return Err(Error::invalid("variable_count", "bundles live over different spaces"));
        }
        let mut s = Vec::with_capacity(self.rank() * other.rank());
        for a in &self.line_summands {
            for b in &other.line_summands {
                s.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        Self::new(self.variable_count, s)
    }

    /// Rank of a trivial bundle containing this one: `Σ_summands Π (|cᵢ| + 1)`.
    ///
    /// The degree-`c` line over `S²` sits inside the trivial bundle of rank `|c| + 1`.
    pub fn trivialization_rank(&self) -> BigInt {
        self.line_summands
            .iter()
            .map(|c| c.iter().fold(BigInt::from(1), |acc, &ci| acc * BigInt::from(ci.unsigned_abs() + 1)))
            .sum()
    }

    /// Product over the summands of their first Chern classes.
    pub fn euler_class(&self) -> Result<SquareFreeClass> {
        self.validate()?;
        let m = self.variable_count;
        let mut acc = SquareFreeClass::one(m)?;
        for c in &self.line_summands {
            let coeffs: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
            acc = acc.try_mul(&SquareFreeClass::linear(m, &coeffs)?)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }
}
