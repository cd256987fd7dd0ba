use commsum::fack::{
    block_two_commutator_split, cuntz_witness, fack_iterate, neumann_solve, random_start, trapecio_step,
    BlockSplitInstance, InnerStep, TowerModel, TowerSpec,
};
use commsum::matcore::{commutator, ComplexMatrix};
use commsum::rng::{random_matrix, seeded};
use proptest::prelude::*;

/// Two-block model: `e_0` of rank `K·r` and `e_1` of rank `r`, so the rank
/// condition holds with equality when `L = 1`.
fn step_model(seed: u64, l: usize, k: usize, r: usize) -> (TowerModel, ComplexMatrix) {
    let size = k * r + 1;
    let spec = TowerSpec {
        blocks: vec![
            commsum::fack::BlockSpec::Rank { size, rank: k * r },
            commsum::fack::BlockSpec::Rank { size: r + 1, rank: r },
        ],
        epsilon: 0.5,
        l,
        k,
        m: 1,
        delta: None,
    };
    let mut rng = seeded(seed);
    let tower = spec.build(&mut rng).unwrap();
    let x = random_start(&mut rng, &tower).unwrap();
    (tower, x)
}

#[test]
fn step_counts_and_bounds_for_all_small_parameters() {
    for l in 1..=3 {
        for k in 1..=3 {
            let (tower, x) = step_model(10 * l as u64 + k as u64, l, k, 2);
            assert!(tower.n <= 24);
            let b = tower.positive_part(1).unwrap();
            let r = trapecio_step(&x, &tower.elements[0], &b, tower.params(0)).unwrap();
            let norm_x = x.operator_norm();
            assert_eq!(r.commutators.len(), l * (l + k - 1));
            assert!(r.z.operator_norm() <= k as f64 * norm_x + 1e-8);
            for (p, q) in &r.commutators {
                assert!(p.operator_norm() * q.operator_norm() <= norm_x + 1e-8);
            }
            let mut recon = r.z.clone();
            for (p, q) in &r.commutators {
                recon += &commutator(p, q).unwrap();
            }
            assert!((&x - &recon).operator_norm() <= 1e-8 * norm_x, "L={l} K={k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phi_contracts_and_neumann_is_bounded(seed in any::<u64>(), l in 1usize..=3, k in 1usize..=2) {
        let (tower, x) = step_model(seed, l, k, 2);
        let a = &tower.elements[0];
        let b = tower.positive_part(1).unwrap();
        let w = cuntz_witness(a, &b, l, k, 0.5).unwrap();
        let q = &w.positive_part_range;
        let mut rng = seeded(seed ^ 0x9e37);
        let bound = (l - 1) as f64 / l as f64;
        for _ in 0..8 {
            let m = random_matrix(&mut rng, q.n_cols(), q.n_cols());
            let y = m.conjugate_by(q);
            let y = y.scale(1.0 / y.operator_norm());
            prop_assert!(w.phi(&y).operator_norm() <= bound + 1e-6);
        }
        let (sol, _) = neumann_solve(&w, &x).unwrap();
        prop_assert!(sol.operator_norm() <= l as f64 * x.operator_norm() + 1e-6);
    }

    #[test]
    fn iteration_residual_follows_the_schedule(seed in any::<u64>(), decay in 0.2f64..0.7, approx in any::<bool>()) {
        let depth = 3;
        let mut spec = TowerSpec::uniform(depth, 2, &[2], 1, 1);
        spec.delta = Some((1..=depth).map(|i| decay.powi(i as i32)).collect());
        let mut rng = seeded(seed);
        let tower = spec.build(&mut rng).unwrap();
        let z0 = random_start(&mut rng, &tower).unwrap();
        let mode = if approx { InnerStep::Approximate } else { InnerStep::Exact };
        let r = fack_iterate(&z0, &tower, depth, mode).unwrap();
        prop_assert!(r.decomposition.residual.operator_norm() <= decay.powi(depth as i32) + 1e-12);
        let mut recon = r.decomposition.residual.clone();
        for (c, d) in r.decomposition.factors.clone().into_pairs() {
            recon += &commutator(&c, &d).unwrap();
        }
        prop_assert!((&recon - &z0).operator_norm() <= 1e-9 * z0.operator_norm().max(1.0));
        prop_assert!(r.collapse_checks().iter().all(|c| c.pass));
    }

    #[test]
    fn block_split_reconstructs(seed in any::<u64>(), blocks in 2usize..=6, size in 2usize..=4) {
        let inst = BlockSplitInstance::random(&mut seeded(seed), blocks, size, size / 2 + 1).unwrap();
        let split = block_two_commutator_split(&inst.b, inst.blocks, &inst.pair_list(), &inst.e).unwrap();
        let nb = inst.b.operator_norm();
        let bracket = commutator(&split.s, &split.e_shift).unwrap();
        prop_assert!((&bracket - &split.b_prime).operator_norm() <= 1e-9 * nb);
        prop_assert!((&inst.b - &(&bracket + &split.b_doubleprime)).operator_norm() <= 1e-9 * nb);
    }
}
