use std::collections::BTreeMap;

use commsum::obstruct::{
    factorial, obstruction_certificate, villadsen_tower, BundleExpr, SquareFreeClass,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn class_strategy() -> impl Strategy<Value = (usize, Vec<(u64, i64)>)> {
    (1usize..=6).prop_flat_map(|m| (Just(m), prop::collection::vec((0u64..(1 << m), -9i64..=9), 0..6)))
}

fn build((m, terms): &(usize, Vec<(u64, i64)>)) -> SquareFreeClass {
    terms.iter().fold(SquareFreeClass::zero(*m).unwrap(), |acc, &(mask, c)| {
        &acc + &SquareFreeClass::monomial(*m, mask, BigInt::from(c)).unwrap()
    })
}

/// Expands `Π_s (Σ_i c_{s,i} α_i)` by summing over every choice of one
/// variable per factor and keeping injective choices.
fn brute_force_product(m: usize, factors: &[Vec<i64>]) -> BTreeMap<u64, BigInt> {
    let mut out: BTreeMap<u64, BigInt> = BTreeMap::new();
    fn rec(m: usize, factors: &[Vec<i64>], mask: u64, coeff: BigInt, out: &mut BTreeMap<u64, BigInt>) {
        let Some((first, rest)) = factors.split_first() else {
            *out.entry(mask).or_default() += coeff;
            return;
        };
        for i in 0..m {
            if mask >> i & 1 == 0 && first[i] != 0 {
                rec(m, rest, mask | 1 << i, &coeff * first[i], out);
            }
        }
    }
    rec(m, factors, 0, BigInt::from(1), &mut out);
    out.retain(|_, c| *c != BigInt::from(0));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn ring_axioms(a in class_strategy(), b_terms in prop::collection::vec((0u64..64, -9i64..=9), 0..6),
                   c_terms in prop::collection::vec((0u64..64, -9i64..=9), 0..6)) {
        let m = a.0;
        let mask = (1u64 << m) - 1;
        let x = build(&a);
        let y = build(&(m, b_terms.into_iter().map(|(k, c)| (k & mask, c)).collect()));
        let z = build(&(m, c_terms.into_iter().map(|(k, c)| (k & mask, c)).collect()));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn euler_class_is_multiplicative_and_matches_brute_force(
        m in 1usize..=5,
        raw in prop::collection::vec(prop::collection::vec(-3i64..=3, 5), 2..6),
        split in 1usize..5,
    ) {
        let summands: Vec<Vec<i64>> = raw.into_iter().map(|mut c| { c.truncate(m); c }).collect();
        let cut = split.min(summands.len() - 1);
        let b1 = BundleExpr::new(m, summands[..cut].to_vec()).unwrap();
        let b2 = BundleExpr::new(m, summands[cut..].to_vec()).unwrap();
        let sum = b1.direct_sum(&b2).unwrap();
        let e = sum.euler_class().unwrap();
        prop_assert_eq!(&e, &(&b1.euler_class().unwrap() * &b2.euler_class().unwrap()));
        prop_assert_eq!(e.coefficients(), &brute_force_product(m, &summands));
    }
}

#[test]
fn sum_of_generators_to_top_power_is_factorial() {
    for m in 1..=8 {
        let p = BundleExpr::bott_power(m).unwrap();
        let e = p.repeat(m).unwrap().euler_class().unwrap();
        let oracle = brute_force_product(m, &vec![vec![1; m]; m]);
        assert_eq!(e.coefficients(), &oracle);
        assert_eq!(oracle.len(), 1);
        assert_eq!(oracle[&((1u64 << m) - 1)], factorial(m as u64));
    }
}

#[test]
fn powers_beyond_variable_count_vanish() {
    for k in 1..=8usize {
        let s = SquareFreeClass::linear(k, &vec![BigInt::from(1); k]).unwrap();
        for e in (k as u32 + 1)..=12 {
            assert!(s.pow(e).is_zero(), "k={k} e={e}");
        }
    }
}

#[test]
fn bott_power_certificates() {
    for m in 1..=6 {
        let c = obstruction_certificate(&BundleExpr::bott_power(m).unwrap(), m).unwrap();
        assert!(c.verdict);
        assert_eq!(c.euler_class.top_coefficient(), factorial(m as u64));
        let over = obstruction_certificate(&BundleExpr::bott_power(m).unwrap(), m + 1).unwrap();
        assert!(!over.verdict);
    }
}

#[test]
fn towers_up_to_three_survive() {
    for m_max in 1..=3 {
        let t = villadsen_tower(m_max).unwrap();
        assert!(t.all_verdicts(), "m_max = {m_max}");
        assert_eq!(t.stages.len(), m_max * (m_max + 1) / 2);
    }
}
