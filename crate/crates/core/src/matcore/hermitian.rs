use std::ops::Deref;

use nalgebra::linalg::SymmetricEigen;

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Modulus above which a component counts for the eigenvector phase convention.
const PHASE_PIVOT: f64 = 1e-8;

/// Dense selfadjoint matrix.
///
/// Construction accepts inputs with `‖a − a*‖_max ≤ 1e−12·(1 + ‖a‖_max)` and
/// stores the exact Hermitian part `(a + a*)/2`.
#[derive(Clone, PartialEq, Debug)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub const DEFAULT_TOL: f64 = 1e-12;

    pub fn new(a: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(a, Self::DEFAULT_TOL)
    }

    pub fn with_tolerance(a: ComplexMatrix, tol: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::invalid(
                "entries",
                format!("matrix is {}x{}, expected square", a.n_rows(), a.n_cols()),
            ));
        }
        if !a.is_finite() {
            return Err(Error::invalid("entries", "matrix has non-finite entries"));
        }
        let defect = a.hermitian_defect();
        if defect > tol * (1.0 + a.max_abs()) {
            return Err(Error::invalid(
                "entries",
                format!("matrix is not Hermitian (‖a − a*‖_max = {defect:e})"),
            ));
        }
        Ok(Self::hermitian_part(&a))
    }

    /// `(a + a*)/2` without any tolerance check.
    pub fn hermitian_part(a: &ComplexMatrix) -> Self {
        HermitianMatrix((a + &a.adjoint()).scale(0.5))
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        HermitianMatrix(ComplexMatrix::from_real_diag(diag))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(ComplexMatrix::zeros(n, n))
    }

    pub fn n(&self) -> usize {
        self.0.n_rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Real part of the trace.
    pub fn real_trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(s))
    }

    /// `u a u*`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self::hermitian_part(&self.0.conjugate_by(u))
    }

    /// `q* a q` for an isometry `q`.
    pub fn compress(&self, q: &ComplexMatrix) -> Self {
        Self::hermitian_part(&self.0.compress(q))
    }
}

impl Deref for HermitianMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Spectral decomposition `a = U diag(λ) U*` with ascending eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors.
    pub unitary: ComplexMatrix,
}

impl EigenSystem {
    /// `U f(Λ) U*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.unitary.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                scaled.set(i, j, scaled.get(i, j) * w);
            }
        }
        HermitianMatrix::hermitian_part(&(&scaled * &self.unitary.adjoint()))
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.apply(|x| x)
    }

    /// Eigenvectors whose eigenvalue satisfies `keep`, as the columns of an isometry.
    pub fn eigenvectors_where(&self, keep: impl Fn(f64) -> bool) -> ComplexMatrix {
        let cols: Vec<usize> = (0..self.eigenvalues.len())
            .filter(|&j| keep(self.eigenvalues[j]))
            .collect();
        let n = self.unitary.n_rows();
        ComplexMatrix::from_fn(n, cols.len(), |i, k| self.unitary.get(i, cols[k]))
    }

    /// `‖U U* − I‖_op`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.unitary.n_rows();
        (&(&self.unitary * &self.unitary.adjoint()) - &ComplexMatrix::identity(n)).operator_norm()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending (ties keep the solver's order). Each eigenvector
/// is rotated so that its first component of modulus above 1e−8 is real and
/// positive, which makes the output a deterministic function of the input.
pub fn hermitian_eig(a: &HermitianMatrix) -> EigenSystem {
    let n = a.n();
    if n == 0 {
        return EigenSystem {
            eigenvalues: Vec::new(),
            unitary: ComplexMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(a.as_matrix().as_inner().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut unitary = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let phase = v
            .iter()
            .find(|z| z.norm() > PHASE_PIVOT)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(C64::new(1.0, 0.0));
        for i in 0..n {
            unitary.set(i, col, v[i] * phase);
        }
    }
    EigenSystem {
        eigenvalues,
        unitary,
    }
}

/// Eigendecomposition of a general matrix that must be Hermitian within `tol`.
pub fn hermitian_eig_checked(a: &ComplexMatrix, tol: f64) -> Result<EigenSystem> {
    Ok(hermitian_eig(&HermitianMatrix::with_tolerance(a.clone(), tol)?))
}
