use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};


use super::bundle::BundleExpr;
use super::certificate::{obstruction_certificate, CertificateKind, ObstructionCertificate};
use crate::error::{Error, Result};

/// Largest `m_max` the audit materializes. `M_4` contains `2^{k_4}` with
/// `k_4` above `4·10⁸`, which is beyond a practical decimal rendering.
pub const MAX_TOWER_M: usize = 3;

/// Largest `kᵢ` used in a trivialization rank `2^{kᵢ}`.
pub const MAX_EXPONENT_BITS: u64 = 1 << 26;

/// Largest total variable count for which a stage is also expanded exactly.
pub const EXACT_VARIABLE_LIMIT: usize = 16;

/// How `k_{m+1}` is chosen from `m`, `M_m` and the `l` sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KRule {
    /// `k_{m+1} = m·M_m·l_{m+1}`, the least value for which every later stage survives.
    #[default]
    Sufficient,
    /// `k_{m+1} = m·M_m·l_m`.
    LiteralMinimal,
    /// Explicit `k_1, …, k_{m_max+1}` as decimal strings.
    Given(Vec<String>),
}

/// One factor `(Σ_{block j} α)^{e}` of a stage Euler class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockFactor {
    pub stage: usize,
    pub variables: String,
    pub exponent: String,
    /// `e ≤ k`: the power is `e!` times the `e`-th elementary symmetric polynomial.
    pub nonzero: bool,
}

/// `e(q_{m,n}^{⊕ m·M_m}) ≠ 0` with `q_{m,n} = ⊕_{j=m+1}^{m+n} P_j^{⊕ l_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageCertificate {
    pub kind: CertificateKind,
    pub m: usize,
    pub n: usize,
    pub multiplicity: String,
    pub blocks: Vec<BlockFactor>,
    /// Coefficient of each surviving monomial, as a product of factorials.
    pub monomial_coefficient: String,
    pub verdict: bool,
    pub paper_ref: String,
    /// Full expansion when the stage has few enough variables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ObstructionCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VilladsenTower {
    pub m_max: usize,
    pub k_rule: KRule,
    /// `k_1, …, k_{m_max+1}`.
    pub k: Vec<String>,
    /// `l_1, …, l_{m_max+1}`.
    pub l: Vec<String>,
    /// `M_1, …, M_{m_max}`.
    #[serde(rename = "M")]
    pub trivialization: Vec<String>,
    /// Indices `n ≥ 2` where `l_n ≠ 2^{n−1}`.
    pub l_power_of_two_mismatch: Vec<usize>,
    pub stages: Vec<StageCertificate>,
}

impl VilladsenTower {
    pub fn all_verdicts(&self) -> bool {
        self.stages.iter().all(|s| s.verdict)
    }
}

/// `l_1 = 1`, `l_{n+1} = Σ_{i≤n} l_i`.
pub fn l_sequence(len: usize) -> Vec<BigUint> {
    let mut l: Vec<BigUint> = Vec::with_capacity(len);
    let mut total = BigUint::zero();
    for n in 0..len {
        let next = if n == 0 { BigUint::one() } else { total.clone() };
        total += &next;
        l.push(next);
    }
    l
}

fn pow2(k: &BigUint) -> Result<BigUint> {
    let bits = k
        .to_u64()
        .filter(|&b| b <= MAX_EXPONENT_BITS)
        .ok_or_else(|| Error::precondition(format!("k = {k} is too large to form 2^k")))?;
    Ok(BigUint::one() << bits)
}

fn parse_big(s: &str, path: String) -> Result<BigUint> {
    s.parse().map_err(|_| Error::invalid(path, format!("not a nonnegative integer: {s:?}")))
}

fn block_factors(k: &[BigUint], l: &[BigUint], m: usize, n: usize, mult: &BigUint) -> Vec<BlockFactor> {
    (m..m + n)
        .map(|j| {
            let e = mult * &l[j];
            BlockFactor {
                stage: j + 1,
                variables: k[j].to_string(),
                exponent: e.to_string(),
                nonzero: e <= k[j],
            }
        })
        .collect()
}

/// Expanded check over `Σ k_j` variables, sphere blocks laid out in order.
fn exact_stage(k: &[BigUint], l: &[BigUint], m: usize, n: usize, mult: &BigUint) -> Result<Option<ObstructionCertificate>> {
    let sizes: Option<Vec<usize>> = (m..m + n).map(|j| k[j].to_usize()).collect();
    let (Some(sizes), Some(mult), Some(ls)) = (
        sizes,
        mult.to_usize(),
        (m..m + n).map(|j| l[j].to_usize()).collect::<Option<Vec<usize>>>(),
    ) else {
        return Ok(None);
    };
    let total: usize = sizes.iter().sum();
    if total > EXACT_VARIABLE_LIMIT || mult * ls.iter().sum::<usize>() > 4 * EXACT_VARIABLE_LIMIT {
        return Ok(None);
    }
    let mut summands = Vec::new();
    let mut offset = 0;
    for (size, lj) in sizes.iter().zip(&ls) {
        let mut c = vec![0i64; total];
        c[offset..offset + size].iter_mut().for_each(|x| *x = 1);
        summands.extend(std::iter::repeat_n(c, *lj));
        offset += size;
    }
    let q = BundleExpr::new(total, summands)?;
    obstruction_certificate(&q, mult).map(Some)
}

fn factorial_product(blocks: &[BlockFactor]) -> String {
    blocks.iter().map(|b| format!("{}!", b.exponent)).collect::<Vec<_>>().join("*")
}

pub fn villadsen_tower(m_max: usize) -> Result<VilladsenTower> {
    villadsen_tower_with(m_max, KRule::default())
}

/// Builds `k`, `l`, `M` and audits every stage `(m, n)` with `m ≤ m_max` and
/// `m + n ≤ m_max + 1`.
pub fn villadsen_tower_with(m_max: usize, rule: KRule) -> Result<VilladsenTower> {
    if m_max == 0 {
        return Err(Error::invalid("m_max", "m_max must be at least 1"));
    }
    if m_max > MAX_TOWER_M {
        return Err(Error::invalid(
            "m_max",
            format!("m_max = {m_max} exceeds {MAX_TOWER_M}: the next trivialization rank has more than 4e8 bits"),
        ));
    }
    let len = m_max + 1;
    let l = l_sequence(len);
    let given = match &rule {
        KRule::Given(ks) => {
            if ks.len() != len {
                return Err(Error::invalid("k", format!("expected {len} values")));
            }
            Some(
                ks.iter()
                    .enumerate()
                    .map(|(i, s)| parse_big(s, format!("k[{i}]")))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
        _ => None,
    };
    let mut k: Vec<BigUint> = vec![given.as_ref().map_or_else(BigUint::one, |g| g[0].clone())];
    let mut big_m: Vec<BigUint> = Vec::with_capacity(m_max);
    let mut acc = BigUint::zero();
    for m in 1..=m_max {
        acc += &l[m - 1] * pow2(&k[m - 1])?;
        big_m.push(acc.clone());
        let base = BigUint::from(m) * &acc;
        let next = match (&rule, &given) {
            (_, Some(g)) => g[m].clone(),
            (KRule::LiteralMinimal, _) => base * &l[m - 1],
            _ => base * &l[m],
        };
        k.push(next);
    }

    let mut stages = Vec::new();
    for m in 1..=m_max {
        let mult = BigUint::from(m) * &big_m[m - 1];
        for n in 1..=len - m {
            let blocks = block_factors(&k, &l, m, n, &mult);
            let verdict = blocks.iter().all(|b| b.nonzero);
            let exact = exact_stage(&k, &l, m, n, &mult)?;
            if let Some(e) = &exact {
                if e.verdict != verdict {
                    return Err(Error::precondition(format!(
                        "stage ({m}, {n}): block rule and expansion disagree"
                    )));
                }
            }
            stages.push(StageCertificate {
                kind: CertificateKind::OneNotBelowNq,
                m,
                n,
                multiplicity: mult.to_string(),
                monomial_coefficient: factorial_product(&blocks),
                blocks,
                verdict,
                paper_ref: "tower stage: [1_Y] not <= m M_m [q_{m,n}] through the Euler class of q_{m,n}^{m M_m}"
                    .into(),
                exact,
            });
        }
    }
    let mismatch = (2..=len).filter(|&n| l[n - 1] != BigUint::one() << (n - 1)).collect();
    Ok(VilladsenTower {
        m_max,
        k_rule: rule,
        k: k.iter().map(ToString::to_string).collect(),
        l: l.iter().map(ToString::to_string).collect(),
        trivialization: big_m.iter().map(ToString::to_string).collect(),
        l_power_of_two_mismatch: mismatch,
        stages,
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_follows_recursion() {
        let l: Vec<String> = l_sequence(5).iter().map(ToString::to_string).collect();
        assert_eq!(l, ["1", "1", "2", "4", "8"]);
    }

    #[test]
    fn three_level_tower() {
        let t = villadsen_tower(3).unwrap();
        assert_eq!(t.k, ["1", "2", "24", "402653256"]);
        assert_eq!(t.trivialization, ["2", "6", "33554438"]);
        assert_eq!(t.l_power_of_two_mismatch, vec![2, 3, 4]);
        assert_eq!(t.stages.len(), 6);
        assert!(t.all_verdicts());
        let first = &t.stages[0];
        assert_eq!((first.m, first.n), (1, 1));
        assert_eq!(first.exact.as_ref().unwrap().euler_class.top_coefficient(), 2.into());
    }

    #[test]
    fn literal_minimal_choice_loses_a_stage() {
        let t = villadsen_tower_with(2, KRule::LiteralMinimal).unwrap();
        assert_eq!(t.k, ["1", "2", "12"]);
        let bad: Vec<(usize, usize)> = t.stages.iter().filter(|s| !s.verdict).map(|s| (s.m, s.n)).collect();
        assert_eq!(bad, vec![(2, 1)]);
    }

    #[test]
    fn given_values_and_limits() {
        let t = villadsen_tower_with(1, KRule::Given(vec!["1".into(), "1".into()])).unwrap();
        assert!(!t.all_verdicts());
        assert!(t.stages[0].exact.as_ref().is_some_and(|e| !e.verdict));
        assert!(villadsen_tower(0).is_err());
        assert!(villadsen_tower(4).is_err());
    }
}
