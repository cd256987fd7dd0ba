//! Commutator decompositions of trace-zero selfadjoint elements in matrix
//! algebras and matrix-valued function algebras over simplicial complexes,
//! and exact Euler-class certificates for when such decompositions must use
//! many commutators.
//!
//! * [`matcore`]: complex matrices, Hermitian eigensystems, verification reports.
//! * [`selfcomm`]: single (self-)commutator decompositions of trace-zero matrices.
//! * [`ozfield`]: colored hat-function partitions of unity on simplicial complexes.
//! * [`fack`]: spectral ramps, rank-comparison witnesses and the iterative
//!   finite-sum construction down a tower of orthogonal blocks.
//! * [`obstruct`]: square-free cohomology rings, Euler classes, obstruction
//!   certificates and the inductive tower audit.

pub mod error;
pub mod exec;
pub mod fack;
pub mod matcore;
pub mod obstruct;
pub mod ozfield;
pub mod rng;
pub mod selfcomm;

pub use error::{Error, Result};
pub use exec::Exec;
