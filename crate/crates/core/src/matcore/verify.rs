use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use crate::error::Result;
use crate::selfcomm::{BoundKind, CommutatorDecomposition};

/// Numerical tolerances shared by the engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative Hermitian defect accepted on input.
    pub hermitian: f64,
    /// `‖UU* − I‖` for eigenbases.
    pub unitary: f64,
    /// Relative eigen-reconstruction error.
    pub reconstruction: f64,
    /// Trace-zero test, relative to `n · max|λ|`.
    pub trace_zero: f64,
    /// Decomposition residuals, relative to `max(1, ‖a‖)`.
    pub verify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-12,
            unitary: 1e-10,
            reconstruction: 1e-10,
            trace_zero: 1e-9,
            verify: 1e-9,
        }
    }
}

impl Tolerances {
    /// Defaults with the verification tolerance replaced.
    pub fn with_verify(verify: f64) -> Self {
        Tolerances {
            verify,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub claimed_bound: f64,
    pub measured_value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, claimed_bound: f64, measured_value: f64, tolerance: f64) -> Self {
        BoundCheck {
            name: name.into(),
            claimed_bound,
            measured_value,
            tolerance,
            pass: measured_value <= claimed_bound + tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct VerificationReport {
    pub residual_norm: f64,
    pub bound_checks: Vec<BoundCheck>,
    pub commutator_count: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.bound_checks.iter().all(|c| c.pass)
    }

    pub fn push(&mut self, check: BoundCheck) {
        self.bound_checks.push(check);
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.bound_checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.bound_checks.iter().filter(|c| !c.pass)
    }
}

/// Re-measures a decomposition of `a` from its factors.
///
/// `residual_norm` is `‖a − Σ commutators‖`. Every claimed bound is measured
/// again, and the stored residual is compared with `a − Σ commutators`.
pub fn verify_decomposition(
    a: &ComplexMatrix,
    decomposition: &CommutatorDecomposition,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    decomposition.check_against(a)?;
    let recon = decomposition.reconstruct()?;
    let diff = a - &recon;
    let residual_norm = diff.operator_norm();
    let scale = a.operator_norm().max(1.0);

    let mut report = VerificationReport {
        residual_norm,
        bound_checks: Vec::new(),
        commutator_count: decomposition.len(),
    };
    report.push(BoundCheck::new(
        "residual_consistency",
        0.0,
        (&diff - &decomposition.residual).operator_norm(),
        tol.verify * scale,
    ));
    for claim in &decomposition.claimed_bounds {
        let measured = match claim.kind {
            BoundKind::MaxFactorSize => decomposition.max_factor_size(),
            BoundKind::ResidualNorm => residual_norm,
            BoundKind::CommutatorCount => decomposition.len() as f64,
        };
        report.push(BoundCheck::new(claim.name.clone(), claim.bound, measured, claim.tolerance));
    }
    Ok(report)
}
