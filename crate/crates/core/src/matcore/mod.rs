//! Dense complex matrices, Hermitian spectral decomposition, norms,
//! commutators, and verification reports.

mod hermitian;
mod json;
mod matrix;
mod verify;

pub use hermitian::{hermitian_eig, hermitian_eig_checked, EigenSystem, HermitianMatrix};
pub use matrix::{commutator, operator_norm, self_commutator, ComplexMatrix, C64};
pub use verify::{verify_decomposition, BoundCheck, Tolerances, VerificationReport};
