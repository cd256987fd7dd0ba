use serde::{Deserialize, Serialize};

use super::ramp::compression_defect;
use super::witness::{cuntz_witness, CuntzWitness};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::matcore::{commutator, BoundCheck, ComplexMatrix, HermitianMatrix, VerificationReport};
use crate::selfcomm::{BoundKind, ClaimedBound, CommutatorDecomposition, Factors};

/// Neumann series stopping residual, relative to `‖x‖`.
pub const NEUMANN_TOL: f64 = 1e-10;
pub const NEUMANN_MAX_ITER: usize = 10_000;
/// Slack on the certified bounds of a step.
pub const STEP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepParams {
    pub l: usize,
    pub k: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapecioResult {
    /// `L(L+K−1)` pairs `((1/L) v_{i,j}*, v_{i,j} y)`, `i` major.
    pub commutators: Vec<(ComplexMatrix, ComplexMatrix)>,
    pub z: ComplexMatrix,
    /// Solution of `y − Φ(y) = x`.
    pub y: ComplexMatrix,
    pub neumann_iterations: usize,
    pub witness: CuntzWitness,
    pub report: VerificationReport,
}

impl TrapecioResult {
    /// `x = Σ [x_k, y_k] + z` as a decomposition with `z` as residual.
    pub fn decomposition(&self, x: &ComplexMatrix) -> CommutatorDecomposition {
        let norm_x = x.operator_norm();
        let count = self.commutators.len() as f64;
        let mut residual = x.clone();
        for (a, b) in &self.commutators {
            residual -= &commutator(a, b).expect("square factors");
        }
        CommutatorDecomposition {
            factors: Factors::General(self.commutators.clone()),
            residual,
            claimed_bounds: vec![
                ClaimedBound::new("z_norm", BoundKind::ResidualNorm, self.witness.k as f64 * norm_x, STEP_TOL),
                ClaimedBound::new("factor_norm_product", BoundKind::MaxFactorSize, norm_x, STEP_TOL),
                ClaimedBound::new("commutator_count", BoundKind::CommutatorCount, count, 0.0),
            ],
        }
    }
}

/// Solves `y − Φ(y) = x` by the Neumann series `Σ Φ^m(x)`.
pub fn neumann_solve(w: &CuntzWitness, x: &ComplexMatrix) -> Result<(ComplexMatrix, usize)> {
    let target = NEUMANN_TOL * x.operator_norm();
    let mut y = x.clone();
    let mut term = x.clone();
    for it in 0..NEUMANN_MAX_ITER {
        term = w.phi(&term);
        let r = term.operator_norm();
        if r <= target {
            return Ok((y, it));
        }
        y += &term;
    }
    Err(Error::NonConvergence {
        iterations: NEUMANN_MAX_ITER,
        residual: term.operator_norm(),
    })
}

/// One decomposition step `x = Σ_{k=1}^{L(L+K−1)} [x_k, y_k] + z` with `z`
/// in the hereditary subalgebra of `b`, `‖z‖ ≤ K‖x‖` and `‖x_k‖·‖y_k‖ ≤ ‖x‖`.
///
/// `x` must lie in the hereditary subalgebra of `(a − ε)₊`.
pub fn trapecio_step(
    x: &ComplexMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    params: StepParams,
) -> Result<TrapecioResult> {
    trapecio_step_with(x, a, b, params, Exec::default())
}

pub fn trapecio_step_with(
    x: &ComplexMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    params: StepParams,
    exec: Exec,
) -> Result<TrapecioResult> {
    let StepParams { l, k, epsilon } = params;
    if x.n_rows() != a.n() || x.n_cols() != a.n() {
        return Err(Error::invalid("x", "x must match the size of a"));
    }
    let witness = cuntz_witness(a, b, l, k, epsilon)?;
    let norm_x = x.operator_norm();
    let outside = compression_defect(x, &witness.positive_part_range);
    if outside > STEP_TOL * norm_x {
        return Err(Error::precondition(format!(
            "x is not in the hereditary subalgebra of (a − ε)₊: ‖x − PxP‖ = {outside:e}"
        )));
    }

    let (y, neumann_iterations) = neumann_solve(&witness, x)?;
    let rows = witness.rows();
    let inv_l = 1.0 / l as f64;
    let commutators: Vec<(ComplexMatrix, ComplexMatrix)> = exec::map_range(exec, rows * l, |idx| {
        let v = witness.block(idx / l, idx % l);
        (v.adjoint().scale(inv_l), &v * &y)
    });
    let n = a.n();
    let mut z = ComplexMatrix::zeros(n, n);
    for i in l - 1..rows {
        for j in 0..l {
            let v = witness.block(i, j);
            z += &(&(&v * &y) * &v.adjoint());
        }
    }
    let z = z.scale(inv_l);

    let mut recon = z.clone();
    for (p, q) in &commutators {
        recon += &commutator(p, q)?;
    }
    let residual = (x - &recon).operator_norm();
    let scale = norm_x.max(1.0);
    let max_product = commutators
        .iter()
        .map(|(p, q)| p.operator_norm() * q.operator_norm())
        .fold(0.0, exec::nan_max);
    let mut report = VerificationReport {
        residual_norm: residual,
        bound_checks: Vec::new(),
        commutator_count: commutators.len(),
    };
    report.push(BoundCheck::new("reconstruction", 0.0, residual, STEP_TOL * norm_x));
    report.push(BoundCheck::new("commutator_count", (l * rows) as f64, commutators.len() as f64, 0.0));
    report.push(BoundCheck::new("z_norm", k as f64 * norm_x, z.operator_norm(), STEP_TOL));
    report.push(BoundCheck::new("factor_norm_product", norm_x, max_product, STEP_TOL));
    report.push(BoundCheck::new("z_support", 0.0, compression_defect(&z, &witness.b_range), STEP_TOL * scale));
    report.push(BoundCheck::new("witness_gram", 0.0, witness.gram_defect(), STEP_TOL));
    report.push(BoundCheck::new("witness_range", 0.0, witness.range_defect(), STEP_TOL));
    report.push(BoundCheck::new("neumann_solution_norm", l as f64 * norm_x, y.operator_norm(), 1e-6));
    Ok(TrapecioResult {
        commutators,
        z,
        y,
        neumann_iterations,
        witness,
        report,
    })
}
