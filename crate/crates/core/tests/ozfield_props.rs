use commsum::matcore::{self_commutator, ComplexMatrix};
use commsum::ozfield::{
    barycentric_subdivide, decompose_field, sample_grid, SimplicialComplex, SimplicialField, VertexColoring,
};
use commsum::rng::{random_trace_zero_hermitian, seeded};
use proptest::prelude::*;

fn fixtures() -> Vec<(&'static str, SimplicialComplex, VertexColoring)> {
    [
        ("circle", SimplicialComplex::circle(5)),
        ("sphere", SimplicialComplex::octahedron()),
        ("triangle", SimplicialComplex::triangle()),
    ]
    .into_iter()
    .map(|(name, c)| {
        let (sub, coloring) = barycentric_subdivide(&c);
        (name, sub, coloring)
    })
    .collect()
}

fn random_field(complex: &SimplicialComplex, n: usize, seed: u64) -> SimplicialField {
    let mut rng = seeded(seed);
    let values = (0..complex.vertex_count()).map(|_| random_trace_zero_hermitian(&mut rng, n)).collect();
    SimplicialField::from_hermitian(complex.clone(), values).unwrap()
}

#[test]
fn hats_form_a_partition_of_unity() {
    for (name, c, _) in fixtures() {
        for p in sample_grid(&c, 6) {
            let total: f64 = (0..c.vertex_count()).map(|v| p.hat(&c, v)).sum();
            assert!((total - 1.0).abs() <= 1e-12, "{name}");
        }
    }
}

#[test]
fn same_colored_hats_have_disjoint_support() {
    for (name, c, coloring) in fixtures() {
        coloring.check_proper(&c).unwrap();
        assert_eq!(coloring.color_count, c.dimension() + 1, "{name}");
        for p in sample_grid(&c, 6) {
            for k in 0..coloring.color_count {
                let class = coloring.class(k);
                for (i, &v) in class.iter().enumerate() {
                    for &w in &class[i + 1..] {
                        assert_eq!(p.hat(&c, v) * p.hat(&c, w), 0.0, "{name}: {v}, {w}");
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn pl_fields_are_reproduced(seed in any::<u64>(), n in 2usize..=4) {
        for (name, c, coloring) in fixtures() {
            let a = random_field(&c, n, seed);
            let d = decompose_field(&a, &coloring).unwrap();
            let sup = a.sup_norm();
            prop_assert_eq!(d.factors.len(), c.dimension() + 1);
            prop_assert!(d.report.passed(), "{}: {:?}", name, d.report);
            for p in sample_grid(&c, 5) {
                // Interpolate the vertex values and evaluate the factors directly.
                let mut target = ComplexMatrix::zeros(n, n);
                let mut sum = ComplexMatrix::zeros(n, n);
                for (v, t) in p.weights(&c) {
                    target += &a.value(v).scale(t);
                }
                for f in &d.factors {
                    let mut y = ComplexMatrix::zeros(n, n);
                    for term in &f.terms {
                        y += &term.x.scale(p.hat(&c, term.vertex).sqrt());
                    }
                    let norm_sq = y.operator_norm().powi(2);
                    prop_assert!(norm_sq <= 2.0 * sup + 1e-8);
                    sum += &self_commutator(&y).unwrap();
                }
                prop_assert!((&target - &sum).operator_norm() <= 1e-8 * sup.max(1e-300));
            }
        }
    }
}
