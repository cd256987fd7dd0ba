use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, ComplexMatrix, EigenSystem, HermitianMatrix};

/// Singular-value threshold, relative to the norm, for ranks and ranges.
pub const RANK_TOL: f64 = 1e-8;

/// Most negative eigenvalue accepted as "positive", relative to `max(1, ‖a‖)`.
pub const PSD_TOL: f64 = 1e-10;

/// `g_{ε/2}`: 0 on `[0, ε/2]`, 1 on `[ε, ∞)`, linear in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRamp {
    pub epsilon: f64,
}

impl SpectralRamp {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", "epsilon must be positive and finite"));
        }
        Ok(SpectralRamp { epsilon })
    }

    pub fn value(&self, t: f64) -> f64 {
        let half = self.epsilon / 2.0;
        ((t - half) / half).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampMode {
    /// `g_{ε/2}(a)`.
    Ramp,
    /// `(a − ε)₊`.
    PositivePart,
}

/// Eigensystem of a positive semidefinite matrix.
pub fn psd_eig(a: &HermitianMatrix) -> Result<EigenSystem> {
    let eig = hermitian_eig(a);
    let floor = -PSD_TOL * a.operator_norm().max(1.0);
    if let Some(&low) = eig.eigenvalues.first() {
        if low < floor {
            return Err(Error::precondition(format!(
                "matrix is not positive semidefinite: smallest eigenvalue {low:e}"
            )));
        }
    }
    Ok(eig)
}

pub fn apply_ramp(a: &HermitianMatrix, epsilon: f64, mode: RampMode) -> Result<HermitianMatrix> {
    let ramp = SpectralRamp::new(epsilon)?;
    let eig = psd_eig(a)?;
    Ok(match mode {
        RampMode::Ramp => eig.apply(|t| ramp.value(t)),
        RampMode::PositivePart => eig.apply(|t| (t - epsilon).max(0.0)),
    })
}

/// Indices of `values` above `RANK_TOL · max(values)`.
pub(crate) fn support(values: &[f64]) -> Vec<usize> {
    let top = values.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return Vec::new();
    }
    (0..values.len()).filter(|&i| values[i] > RANK_TOL * top).collect()
}

/// Orthonormal basis (columns, ascending eigenvalue order) of the range of
/// `f(a)` for a nonnegative function `f` of the spectrum.
pub(crate) fn range_basis(eig: &EigenSystem, f: impl Fn(f64) -> f64) -> (ComplexMatrix, Vec<f64>) {
    let fv: Vec<f64> = eig.eigenvalues.iter().map(|&t| f(t)).collect();
    let keep = support(&fv);
    let n = eig.unitary.n_rows();
    let basis = ComplexMatrix::from_fn(n, keep.len(), |r, c| eig.unitary.get(r, keep[c]));
    (basis, keep.iter().map(|&i| fv[i]).collect())
}

/// Range basis of a positive matrix.
pub fn positive_range(a: &HermitianMatrix) -> Result<ComplexMatrix> {
    Ok(range_basis(&psd_eig(a)?, |t| t.max(0.0)).0)
}

/// Rank of a positive matrix at threshold `RANK_TOL · ‖a‖`.
pub fn positive_rank(a: &HermitianMatrix) -> Result<usize> {
    Ok(positive_range(a)?.n_cols())
}

/// `q q*` for a matrix with orthonormal columns.
pub(crate) fn projection(q: &ComplexMatrix) -> ComplexMatrix {
    q * &q.adjoint()
}

/// `‖x − p x p‖` for the projection `p = q q*`.
pub(crate) fn compression_defect(x: &ComplexMatrix, q: &ComplexMatrix) -> f64 {
    let p = projection(q);
    (x - &(&(&p * x) * &p)).operator_norm()
}
