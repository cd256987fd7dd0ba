use commsum::matcore::{verify_decomposition, Tolerances};
use commsum::rng::{random_trace_zero_hermitian, random_unitary, seeded};
use commsum::selfcomm::{greedy_nonneg_order, self_commutator_decompose, signed_order, tight_commutator_decompose};
use commsum::matcore::HermitianMatrix;
use proptest::prelude::*;

/// Zero-sum multisets of size `1..=max_len` with entries in `[-5, 5]`, sorted.
fn zero_sum_multisets(max_len: usize) -> Vec<Vec<i32>> {
    fn rec(start: i32, left: usize, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if !cur.is_empty() && cur.iter().sum::<i32>() == 0 {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for v in start..=5 {
            cur.push(v);
            rec(v, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(-5, max_len, &mut Vec::new(), &mut out);
    out
}

fn next_permutation(v: &mut [i32]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Least `max_k s_k` over all orders with every partial sum `≥ 0`.
fn optimal_nonneg_peak(values: &[i32]) -> i32 {
    let mut p = values.to_vec();
    p.sort();
    let mut best = i32::MAX;
    loop {
        let mut s = 0;
        let mut peak = 0;
        let ok = p.iter().all(|&x| {
            s += x;
            peak = peak.max(s);
            s >= 0
        });
        if ok {
            best = best.min(peak);
        }
        if !next_permutation(&mut p) {
            return best;
        }
    }
}

#[test]
fn greedy_and_signed_orders_exhaustive() {
    let family = zero_sum_multisets(8);
    assert!(family.len() > 1000);
    for m in &family {
        let vals: Vec<f64> = m.iter().map(|&x| x as f64).collect();
        let top = m.iter().map(|x| x.abs()).max().unwrap() as f64;
        let g = greedy_nonneg_order(&vals).unwrap();
        assert!(g.partial_sums.iter().all(|&s| (0.0..=2.0 * top).contains(&s)), "{m:?}");
        let s = signed_order(&vals).unwrap();
        assert!(s.partial_sums.iter().all(|&x| x.abs() <= top), "{m:?}");
    }
}

#[test]
fn optimal_order_oracle_stays_below_greedy_constant() {
    let mut worst = (0.0, Vec::new());
    for m in zero_sum_multisets(7) {
        let top = m.iter().map(|x| x.abs()).max().unwrap();
        if top == 0 {
            continue;
        }
        let opt = optimal_nonneg_peak(&m);
        let g = greedy_nonneg_order(&m.iter().map(|&x| x as f64).collect::<Vec<_>>()).unwrap();
        assert!(opt as f64 <= g.max_partial_sum() + 1e-12);
        let ratio = opt as f64 / top as f64;
        if ratio > worst.0 {
            worst = (ratio, m);
        }
    }
    assert!(worst.0 <= 2.0);
    assert_eq!(worst, (1.5, vec![-4, -4, -4, 3, 3, 3, 3]));
    assert_eq!(optimal_nonneg_peak(&[1, 1, -1, -1]), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn single_self_commutator_bounds(seed in any::<u64>(), n in 2usize..=16) {
        let a = random_trace_zero_hermitian(&mut seeded(seed), n);
        let norm = a.operator_norm();
        let d = self_commutator_decompose(&a).unwrap();
        let r = verify_decomposition(a.as_matrix(), &d, &Tolerances::default()).unwrap();
        prop_assert!(r.residual_norm <= 1e-9 * norm.max(1.0));
        prop_assert!(d.max_factor_size() <= 2.0 * norm + 1e-9);
        let t = tight_commutator_decompose(&a).unwrap();
        let rt = verify_decomposition(a.as_matrix(), &t, &Tolerances::default()).unwrap();
        prop_assert!(rt.residual_norm <= 1e-9 * norm.max(1.0));
        prop_assert!(t.max_factor_size() <= norm + 1e-9);
    }

    #[test]
    fn unitary_covariance(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = seeded(seed);
        let a = random_trace_zero_hermitian(&mut rng, n);
        let u = random_unitary(&mut rng, n);
        let b = HermitianMatrix::hermitian_part(&a.as_matrix().conjugate_by(&u));
        let (da, db) = (self_commutator_decompose(&a).unwrap(), self_commutator_decompose(&b).unwrap());
        let tol = Tolerances::default();
        let ra = verify_decomposition(a.as_matrix(), &da, &tol).unwrap();
        let rb = verify_decomposition(b.as_matrix(), &db, &tol).unwrap();
        prop_assert!((ra.residual_norm - rb.residual_norm).abs() <= 1e-8);
        prop_assert!((da.max_factor_size() - db.max_factor_size()).abs() <= 1e-8);
    }
}
