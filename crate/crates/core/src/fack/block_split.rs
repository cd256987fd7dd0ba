use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ramp::{apply_ramp, positive_range, RampMode};
use crate::error::{Error, Result};
use crate::matcore::{commutator, BoundCheck, ComplexMatrix, HermitianMatrix, VerificationReport};
use crate::rng::{random_matrix, random_with_spectrum};

pub const SPLIT_TOL: f64 = 1e-9;
pub const TRACE_CONDITION_TOL: f64 = 1e-8;

/// `b = [S, E] + b″` for `b` in `M_n` over a hereditary subalgebra.
///
/// `S` has `s_i = Σ_{j≤i} (b_jj − [x_j, y_j])` on the block superdiagonal and
/// `E` has `e` on the block subdiagonal, so `[S, E]` is the block diagonal
/// `b′ = diag(b_ii − [x_i, y_i])`. The diagonal of `b″ = b − b′` is `[x_i, y_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSplit {
    pub s: ComplexMatrix,
    pub e_shift: ComplexMatrix,
    pub partial_sums: Vec<ComplexMatrix>,
    pub b_prime: ComplexMatrix,
    pub b_doubleprime: ComplexMatrix,
    pub report: VerificationReport,
}

fn check_unit(e: &ComplexMatrix, s: &ComplexMatrix, i: usize) -> Result<()> {
    let scale = s.operator_norm().max(1.0);
    let left = (&(e * s) - s).operator_norm();
    let right = (&(s * e) - s).operator_norm();
    if left.max(right) > TRACE_CONDITION_TOL * scale {
        return Err(Error::precondition(format!(
            "e does not act as a unit on s_{}: ‖e s − s‖ = {left:e}, ‖s e − s‖ = {right:e}",
            i + 1
        )));
    }
    Ok(())
}

pub fn block_two_commutator_split(
    b: &ComplexMatrix,
    n_blocks: usize,
    pairs: &[(ComplexMatrix, ComplexMatrix)],
    e: &ComplexMatrix,
) -> Result<BlockSplit> {
    if n_blocks == 0 || !b.is_square() || b.n_rows() % n_blocks != 0 {
        return Err(Error::invalid("b", "b must be square with size divisible by the block count"));
    }
    let m = b.n_rows() / n_blocks;
    if pairs.len() != n_blocks {
        return Err(Error::invalid("pairs", format!("expected {n_blocks} pairs, got {}", pairs.len())));
    }
    for (i, (x, y)) in pairs.iter().enumerate() {
        if [x, y].iter().any(|p| p.n_rows() != m || p.n_cols() != m) {
            return Err(Error::invalid(format!("pairs[{i}]"), format!("expected {m}x{m} factors")));
        }
    }
    if e.n_rows() != m || e.n_cols() != m {
        return Err(Error::invalid("e", format!("expected a {m}x{m} matrix")));
    }

    let mut diffs = Vec::with_capacity(n_blocks);
    for (i, (x, y)) in pairs.iter().enumerate() {
        diffs.push(&b.block(i * m, i * m, m, m) - &commutator(x, y)?);
    }
    let mut total = ComplexMatrix::zeros(m, m);
    for d in &diffs {
        total += d;
    }
    let norm_b = b.operator_norm();
    let defect = total.operator_norm();
    if defect > TRACE_CONDITION_TOL * norm_b.max(1.0) {
        let msg = if n_blocks == 1 {
            format!("b_11 differs from [x_1, y_1] by {defect:e}")
        } else {
            format!("Σ b_ii − Σ [x_i, y_i] has norm {defect:e}")
        };
        return Err(Error::precondition(msg));
    }

    let mut partial_sums = Vec::with_capacity(n_blocks.saturating_sub(1));
    let mut acc = ComplexMatrix::zeros(m, m);
    for d in diffs.iter().take(n_blocks - 1) {
        acc += d;
        partial_sums.push(acc.clone());
    }
    for (i, s) in partial_sums.iter().enumerate() {
        check_unit(e, s, i)?;
    }

    let size = n_blocks * m;
    let mut s = ComplexMatrix::zeros(size, size);
    let mut e_shift = ComplexMatrix::zeros(size, size);
    for (i, si) in partial_sums.iter().enumerate() {
        s.set_block(i * m, (i + 1) * m, si);
        e_shift.set_block((i + 1) * m, i * m, e);
    }
    let b_prime = ComplexMatrix::block_diag(&diffs);
    let b_doubleprime = b - &b_prime;
    let bracket = commutator(&s, &e_shift)?;

    let diag_defect = pairs
        .iter()
        .enumerate()
        .map(|(i, (x, y))| {
            (&b_doubleprime.block(i * m, i * m, m, m) - &commutator(x, y).expect("checked sizes")).operator_norm()
        })
        .fold(0.0, f64::max);
    let tol = SPLIT_TOL * norm_b;
    let reconstruction = (b - &(&bracket + &b_doubleprime)).operator_norm();
    let mut report = VerificationReport {
        residual_norm: reconstruction,
        bound_checks: Vec::new(),
        commutator_count: 1,
    };
    report.push(BoundCheck::new("b_prime_commutator", 0.0, (&bracket - &b_prime).operator_norm(), tol));
    report.push(BoundCheck::new("reconstruction", 0.0, reconstruction, tol));
    report.push(BoundCheck::new("b_doubleprime_diagonal", 0.0, diag_defect, tol));
    Ok(BlockSplit {
        s,
        e_shift,
        partial_sums,
        b_prime,
        b_doubleprime,
        report,
    })
}

/// Inputs of [`block_two_commutator_split`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSplitInstance {
    pub blocks: usize,
    pub b: ComplexMatrix,
    pub pairs: Vec<SplitPair>,
    pub e: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPair {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
}

impl BlockSplitInstance {
    pub fn pair_list(&self) -> Vec<(ComplexMatrix, ComplexMatrix)> {
        self.pairs.iter().map(|p| (p.x.clone(), p.y.clone())).collect()
    }

    pub fn split(&self) -> Result<BlockSplit> {
        block_two_commutator_split(&self.b, self.blocks, &self.pair_list(), &self.e)
    }

    /// Random instance over `M_m`: `c` positive with `rank` eigenvalues in
    /// `[0.6, 1]`, blocks and pairs compressed to the range of `(c − ε)₊` with
    /// `ε = 0.5`, `b_nn` shifted so the trace condition holds, and `e = g_{ε/2}(c)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, blocks: usize, m: usize, rank: usize) -> Result<Self> {
        let eps = 0.5;
        let spectrum: Vec<f64> = (0..m)
            .map(|i| if i < rank { rng.random_range(0.6..=1.0) } else { rng.random_range(0.0..0.2) })
            .collect();
        let c = random_with_spectrum(rng, &spectrum);
        let q = positive_range(&apply_ramp(&c, eps, RampMode::PositivePart)?)?;
        let r = q.n_cols();
        let hered = |rng: &mut R| random_matrix(rng, r, r).conjugate_by(&q);
        let mut b = ComplexMatrix::zeros(blocks * m, blocks * m);
        for i in 0..blocks {
            for j in 0..blocks {
                b.set_block(i * m, j * m, &hered(rng));
            }
        }
        let pairs: Vec<(ComplexMatrix, ComplexMatrix)> = (0..blocks).map(|_| (hered(rng), hered(rng))).collect();
        let mut gap = ComplexMatrix::zeros(m, m);
        for (i, (x, y)) in pairs.iter().enumerate() {
            gap += &(&commutator(x, y)? - &b.block(i * m, i * m, m, m));
        }
        let last = (blocks - 1) * m;
        let adjusted = &b.block(last, last, m, m) + &gap;
        b.set_block(last, last, &adjusted);
        let e = apply_ramp(&c, eps, RampMode::Ramp)?.into_matrix();
        Ok(BlockSplitInstance {
            blocks,
            b,
            pairs: pairs.into_iter().map(|(x, y)| SplitPair { x, y }).collect(),
            e,
        })
    }
}

/// Hermitian-input convenience: `b` given as a Hermitian matrix.
pub fn block_two_commutator_split_hermitian(
    b: &HermitianMatrix,
    n_blocks: usize,
    pairs: &[(ComplexMatrix, ComplexMatrix)],
    e: &ComplexMatrix,
) -> Result<BlockSplit> {
    block_two_commutator_split(b.as_matrix(), n_blocks, pairs, e)
}
