//! Seeded random instances.
//!
//! All generators draw from [`SplitMix64`] (state += 0x9E3779B97F4A7C15,
//! then the Stafford "mix13" finalizer), seeded directly with the user's
//! 64-bit seed, so a seed fixes every random instance bit for bit.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
pub use rand_xoshiro::SplitMix64;

use crate::matcore::{ComplexMatrix, HermitianMatrix, C64};

pub fn seeded(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Complex Gaussian entry with unit variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, complex_normal(rng));
        }
    }
    m
}

/// Hermitian matrix `(g + g*)/2` for Gaussian `g`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    HermitianMatrix::hermitian_part(&random_matrix(rng, n, n))
}

pub fn random_trace_zero_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    remove_trace(&random_hermitian(rng, n))
}

/// `a − (tr a / n)·1`.
pub fn remove_trace(a: &HermitianMatrix) -> HermitianMatrix {
    let n = a.n();
    let shift = a.real_trace() / n as f64;
    HermitianMatrix::hermitian_part(&(a.as_matrix() - &ComplexMatrix::identity(n).scale(shift)))
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n).into_inner();
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_inner(q)
}

/// `U diag(spectrum) U*` for a random unitary `U`.
pub fn random_with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> HermitianMatrix {
    let u = random_unitary(rng, spectrum.len());
    HermitianMatrix::from_real_diag(spectrum).conjugate_by(&u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        let a = random_matrix(&mut seeded(7), 3, 3);
        let b = random_matrix(&mut seeded(7), 3, 3);
        let c = random_matrix(&mut seeded(8), 3, 3);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(&mut seeded(1), 6);
        let defect = (&(&u * &u.adjoint()) - &ComplexMatrix::identity(6)).operator_norm();
        assert!(defect < 1e-12);
    }

    #[test]
    fn trace_zero_sample() {
        let a = random_trace_zero_hermitian(&mut seeded(3), 5);
        assert!(a.trace().norm() < 1e-12);
    }
}
