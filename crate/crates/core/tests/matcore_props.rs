use commsum::matcore::{commutator, hermitian_eig, ComplexMatrix};
use commsum::rng::{random_hermitian, random_matrix, random_unitary, seeded};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn commutators_are_trace_free(seed in any::<u64>(), n in 1usize..12, scale in 0.01f64..100.0) {
        let mut rng = seeded(seed);
        let x = random_matrix(&mut rng, n, n).scale(scale);
        let y = random_matrix(&mut rng, n, n);
        let tr = commutator(&x, &y).unwrap().trace().norm();
        prop_assert!(tr <= 1e-10 * n as f64 * (1.0 + x.operator_norm() * y.operator_norm()));
    }

    #[test]
    fn eigensolver_is_deterministic(seed in any::<u64>(), n in 1usize..12) {
        let a = random_hermitian(&mut seeded(seed), n);
        let b = random_hermitian(&mut seeded(seed), n);
        let (e1, e2) = (hermitian_eig(&a), hermitian_eig(&b));
        prop_assert_eq!(
            e1.eigenvalues.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            e2.eigenvalues.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        prop_assert_eq!(e1.unitary, e2.unitary);
    }

    #[test]
    fn norm_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = seeded(seed);
        let a = random_matrix(&mut rng, n, n);
        let u = random_unitary(&mut rng, n);
        let (before, after) = (a.operator_norm(), a.conjugate_by(&u).operator_norm());
        prop_assert!((before - after).abs() <= 1e-9 * before.max(1e-300));
    }
}

#[test]
fn operator_norm_of_rank_one_matches_vector_norms() {
    // ‖u v*‖ = |u|·|v|: independent of the SVD route.
    let u = [3.0, 4.0];
    let v = [1.0, 2.0, 2.0];
    let m = ComplexMatrix::from_fn(2, 3, |i, j| (u[i] * v[j]).into());
    assert!((m.operator_norm() - 15.0).abs() < 1e-12);
}
