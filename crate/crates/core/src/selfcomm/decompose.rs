use super::decomposition::{BoundKind, ClaimedBound, CommutatorDecomposition, Factors};
use super::order::{greedy_nonneg_order_with, signed_order_with, PartialSumOrder};
use crate::error::Result;
use crate::matcore::{commutator, hermitian_eig, ComplexMatrix, HermitianMatrix, Tolerances, C64};

/// Slack allowed on the factor-size bounds.
pub const BOUND_SLACK: f64 = 1e-9;

/// Columns of `unitary` reordered by `order.permutation`.
fn ordered_basis(unitary: &ComplexMatrix, order: &PartialSumOrder) -> ComplexMatrix {
    let n = unitary.n_rows();
    ComplexMatrix::from_fn(n, n, |i, k| unitary.get(i, order.permutation[k]))
}

/// Weighted shift `Σ_k w_k e_{k+1,k}` (`below = true`) or `Σ_k w_k e_{k,k+1}`.
pub(crate) fn weighted_shift(weights: &[f64], n: usize, below: bool) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for (k, &w) in weights.iter().enumerate().take(n.saturating_sub(1)) {
        let (i, j) = if below { (k + 1, k) } else { (k, k + 1) };
        m.set(i, j, C64::new(w, 0.0));
    }
    m
}

fn residual_claim(norm_a: f64, tol: &Tolerances) -> ClaimedBound {
    ClaimedBound::new("residual", BoundKind::ResidualNorm, 0.0, tol.verify * norm_a.max(1.0))
}

/// `a = [x*, x]` with `‖x‖² ≤ 2‖a‖` for trace-zero Hermitian `a`.
///
/// Diagonalize, reorder the eigenvalues with [`greedy_nonneg_order`] so every
/// partial sum `s_k` is in `[0, 2‖a‖]`, and take the weighted shift
/// `Σ √s_k e_{k+1,k}` in the reordered eigenbasis.
///
/// [`greedy_nonneg_order`]: super::greedy_nonneg_order
pub fn self_commutator_decompose(a: &HermitianMatrix) -> Result<CommutatorDecomposition> {
    self_commutator_decompose_with(a, &Tolerances::default())
}

pub fn self_commutator_decompose_with(
    a: &HermitianMatrix,
    tol: &Tolerances,
) -> Result<CommutatorDecomposition> {
    let n = a.n();
    let eig = hermitian_eig(a);
    let order = greedy_nonneg_order_with(&eig.eigenvalues, tol.trace_zero)?;
    let weights: Vec<f64> = order.partial_sums.iter().map(|s| s.max(0.0).sqrt()).collect();
    let basis = ordered_basis(&eig.unitary, &order);
    let x = weighted_shift(&weights, n, true).conjugate_by(&basis);

    let norm_a = a.operator_norm();
    let residual = a.as_matrix() - &commutator(&x.adjoint(), &x)?;
    Ok(CommutatorDecomposition {
        factors: Factors::SelfCommutators(vec![x]),
        residual,
        claimed_bounds: vec![
            residual_claim(norm_a, tol),
            ClaimedBound::new("factor_norm_sq", BoundKind::MaxFactorSize, 2.0 * norm_a, BOUND_SLACK),
            ClaimedBound::new("commutator_count", BoundKind::CommutatorCount, 1.0, 0.0),
        ],
    })
}

/// `a = [x, y]` with `‖x‖·‖y‖ ≤ ‖a‖` for trace-zero Hermitian `a`.
///
/// Uses [`signed_order`] so partial sums lie in `[−‖a‖, ‖a‖]`; `x` carries
/// them on the superdiagonal and `y` is the unit subdiagonal shift.
///
/// [`signed_order`]: super::signed_order
pub fn tight_commutator_decompose(a: &HermitianMatrix) -> Result<CommutatorDecomposition> {
    tight_commutator_decompose_with(a, &Tolerances::default())
}

pub fn tight_commutator_decompose_with(
    a: &HermitianMatrix,
    tol: &Tolerances,
) -> Result<CommutatorDecomposition> {
    let n = a.n();
    let eig = hermitian_eig(a);
    let order = signed_order_with(&eig.eigenvalues, tol.trace_zero)?;
    let norm_a = a.operator_norm();

    let (x, y) = if a.is_zero() {
        (ComplexMatrix::zeros(n, n), ComplexMatrix::zeros(n, n))
    } else {
        let basis = ordered_basis(&eig.unitary, &order);
        let upper = weighted_shift(&order.partial_sums, n, false);
        let lower = weighted_shift(&vec![1.0; n.saturating_sub(1)], n, true);
        (upper.conjugate_by(&basis), lower.conjugate_by(&basis))
    };
    let residual = a.as_matrix() - &commutator(&x, &y)?;
    Ok(CommutatorDecomposition {
        factors: Factors::General(vec![(x, y)]),
        residual,
        claimed_bounds: vec![
            residual_claim(norm_a, tol),
            ClaimedBound::new("factor_norm_product", BoundKind::MaxFactorSize, norm_a, BOUND_SLACK),
            ClaimedBound::new("commutator_count", BoundKind::CommutatorCount, 1.0, 0.0),
        ],
    })
}
