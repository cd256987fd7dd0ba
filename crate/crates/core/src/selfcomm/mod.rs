//! Single-commutator decompositions of trace-zero Hermitian matrices.

mod collapse;
mod decompose;
mod decomposition;
mod order;

pub use collapse::{collapse_indexwise, collapse_orthogonal, collapse_orthogonal_with, Collapsed, ORTHOGONALITY_TOL};
pub use decompose::{
    self_commutator_decompose, self_commutator_decompose_with, tight_commutator_decompose,
    tight_commutator_decompose_with, BOUND_SLACK,
};
pub use decomposition::{
    BoundKind, ClaimedBound, CommutatorDecomposition, CommutatorKind, DecompositionJson, FactorJson,
    FactorPair, Factors, SelfFactor,
};
pub use order::{
    check_trace_zero, greedy_nonneg_order, greedy_nonneg_order_with, signed_order, signed_order_with,
    PartialSumOrder, DEFAULT_TRACE_TOL,
};

use crate::exec::{self, Exec};
use crate::error::Result;
use crate::matcore::HermitianMatrix;

/// [`self_commutator_decompose`] over a batch, results in input order.
pub fn self_commutator_decompose_batch(
    exec: Exec,
    elements: &[HermitianMatrix],
) -> Vec<Result<CommutatorDecomposition>> {
    exec::map(exec, elements, self_commutator_decompose)
}

/// [`tight_commutator_decompose`] over a batch, results in input order.
pub fn tight_commutator_decompose_batch(
    exec: Exec,
    elements: &[HermitianMatrix],
) -> Vec<Result<CommutatorDecomposition>> {
    exec::map(exec, elements, tight_commutator_decompose)
}
