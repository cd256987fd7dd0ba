use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest variable count; monomials are bitmasks in a `u64`.
pub const MAX_VARIABLES: usize = 64;

/// Element of `ℤ[α₁, …, α_m] / (αᵢ² = 0)`.
///
/// Monomials are square-free, so each is a subset of the variables, stored as
/// a bitmask (bit `i` is `α_{i+1}`). Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareFreeClass {
    variable_count: usize,
    coefficients: BTreeMap<u64, BigInt>,
}

fn check_count(m: usize) -> Result<()> {
    if m > MAX_VARIABLES {
        return Err(Error::invalid(
            "variable_count",
            format!("at most {MAX_VARIABLES} variables are supported, got {m}"),
        ));
    }
    Ok(())
}

impl SquareFreeClass {
    pub fn zero(variable_count: usize) -> Result<Self> {
        check_count(variable_count)?;
        Ok(SquareFreeClass {
            variable_count,
            coefficients: BTreeMap::new(),
        })
    }

    pub fn one(variable_count: usize) -> Result<Self> {
        Self::monomial(variable_count, 0, BigInt::one())
    }

    /// `coeff · Π_{i ∈ mask} α_{i+1}`.
    pub fn monomial(variable_count: usize, mask: u64, coeff: BigInt) -> Result<Self> {
        let mut c = Self::zero(variable_count)?;
        if variable_count < 64 && mask >> variable_count != 0 {
            return Err(Error::invalid("subset", format!("monomial uses a variable beyond α_{variable_count}")));
        }
        c.add_term(mask, coeff);
        Ok(c)
    }

    /// `α_{i+1}` (0-based `i`).
    pub fn variable(variable_count: usize, i: usize) -> Result<Self> {
        if i >= variable_count {
            return Err(Error::invalid("variable", format!("index {i} out of range for {variable_count} variables")));
        }
        Self::monomial(variable_count, 1u64 << i, BigInt::one())
    }

    /// `Σ cᵢ α_{i+1}`.
    pub fn linear(variable_count: usize, coeffs: &[BigInt]) -> Result<Self> {
        if coeffs.len() != variable_count {
            return Err(Error::invalid("coeffs", format!("expected {variable_count} coefficients")));
        }
        let mut c = Self::zero(variable_count)?;
        for (i, a) in coeffs.iter().enumerate() {
            c.add_term(1u64 << i, a.clone());
        }
        Ok(c)
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn coefficients(&self) -> &BTreeMap<u64, BigInt> {
        &self.coefficients
    }

    pub fn coefficient(&self, mask: u64) -> BigInt {
        self.coefficients.get(&mask).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Largest monomial degree, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.coefficients.keys().map(|m| m.count_ones()).max()
    }

    /// Coefficient of `α₁⋯α_m`.
    pub fn top_coefficient(&self) -> BigInt {
        self.coefficient(full_mask(self.variable_count))
    }

    fn add_term(&mut self, mask: u64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coefficients.entry(mask).or_default();
        *entry += coeff;
        if entry.is_zero() {
            self.coefficients.remove(&mask);
        }
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if self.variable_count != other.variable_count {
            return Err(Error::invalid(
                "variable_count",
                format!("variable counts differ: {} vs {}", self.variable_count, other.variable_count),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (&m, c) in &other.coefficients {
            out.add_term(m, c.clone());
        }
        Ok(out)
    }

    /// Product with `αᵢ² = 0`: overlapping monomials annihilate.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let mut out = Self::zero(self.variable_count)?;
        for (&m1, c1) in &self.coefficients {
            for (&m2, c2) in &other.coefficients {
                if m1 & m2 == 0 {
                    out.add_term(m1 | m2, c1 * c2);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.variable_count).expect("valid count");
        for _ in 0..e {
            acc = acc.try_mul(self).expect("same ring");
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let mut out = Self::zero(self.variable_count).expect("valid count");
        for (&m, c) in &self.coefficients {
            out.add_term(m, c * k);
        }
        out
    }
}

pub(crate) fn full_mask(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `(Σ cᵢ αᵢ)^e = e! · Σ_{|S| = e} Π_{i∈S} cᵢ`, summed over `e`-subsets directly.
pub fn linear_power(variable_count: usize, coeffs: &[BigInt], e: u32) -> Result<SquareFreeClass> {
    if coeffs.len() != variable_count {
        return Err(Error::invalid("coeffs", format!("expected {variable_count} coefficients")));
    }
    let mut out = SquareFreeClass::zero(variable_count)?;
    if e as usize > variable_count {
        return Ok(out);
    }
    let fact = factorial(e as u64);
    let support: Vec<usize> = (0..variable_count).filter(|&i| !coeffs[i].is_zero()).collect();
    for_each_subset(&support, e as usize, &mut |subset| {
        let mut mask = 0u64;
        let mut prod = fact.clone();
        for &i in subset {
            mask |= 1 << i;
            prod *= &coeffs[i];
        }
        out.add_term(mask, prod);
    });
    Ok(out)
}

fn for_each_subset(items: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::with_capacity(k), f);
}

impl Add for &SquareFreeClass {
    type Output = SquareFreeClass;
    fn add(self, rhs: Self) -> SquareFreeClass {
        self.try_add(rhs).expect("variable counts must match")
    }
}

impl Sub for &SquareFreeClass {
    type Output = SquareFreeClass;
    fn sub(self, rhs: Self) -> SquareFreeClass {
        self.try_add(&-rhs).expect("variable counts must match")
    }
}

impl Neg for &SquareFreeClass {
    type Output = SquareFreeClass;
    fn neg(self) -> SquareFreeClass {
        self.scale(&-BigInt::one())
    }
}

impl Mul for &SquareFreeClass {
    type Output = SquareFreeClass;
    fn mul(self, rhs: Self) -> SquareFreeClass {
        self.try_mul(rhs).expect("variable counts must match")
    }
}

/// `"1,3"` for `α₁α₃`; the empty string is the constant term.
pub fn subset_key(mask: u64) -> String {
    (0..64)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_subset_key(key: &str, variable_count: usize) -> Result<u64> {
    let mut mask = 0u64;
    for part in key.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let i: usize = part
            .parse()
            .map_err(|_| Error::invalid(format!("euler_class.{key}"), format!("bad variable index {part:?}")))?;
        if i == 0 || i > variable_count {
            return Err(Error::invalid(format!("euler_class.{key}"), format!("variable {i} out of range")));
        }
        mask |= 1 << (i - 1);
    }
    Ok(mask)
}

impl fmt::Display for SquareFreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (&m, c)) in self.coefficients.iter().enumerate() {
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            let vars: Vec<String> = (0..64).filter(|i| m >> i & 1 == 1).map(|i| format!("a{}", i + 1)).collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{abs}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// JSON: `{"variable_count": m, "terms": {"1,2": "2"}}`, coefficients as decimal strings.
#[derive(Serialize, Deserialize)]
struct ClassRepr {
    variable_count: usize,
    terms: BTreeMap<String, String>,
}

impl Serialize for SquareFreeClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ClassRepr {
            variable_count: self.variable_count,
            terms: self.coefficients.iter().map(|(&m, c)| (subset_key(m), c.to_string())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SquareFreeClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ClassRepr::deserialize(deserializer)?;
        let mut c = SquareFreeClass::zero(repr.variable_count).map_err(D::Error::custom)?;
        for (k, v) in &repr.terms {
            let mask = parse_subset_key(k, repr.variable_count).map_err(D::Error::custom)?;
            let coeff: BigInt = v.parse().map_err(|_| D::Error::custom(format!("bad coefficient {v:?}")))?;
            c.add_term(mask, coeff);
        }
        Ok(c)
    }
}
