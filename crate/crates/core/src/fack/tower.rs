use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ramp::{compression_defect, positive_range, psd_eig, range_basis, SpectralRamp};
use super::trapecio::{trapecio_step_with, StepParams, TrapecioResult};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matcore::{commutator, BoundCheck, ComplexMatrix, HermitianMatrix, VerificationReport};
use crate::rng::{random_hermitian, random_with_spectrum};
use crate::selfcomm::{
    collapse_indexwise, self_commutator_decompose, BoundKind, ClaimedBound, CommutatorDecomposition, Factors,
    ORTHOGONALITY_TOL,
};

/// Norm constant of the in-block step: `‖x‖² ≤ 2‖b‖` for `b = [x*, x]`.
pub const INNER_NORM_CONSTANT: f64 = 2.0;

/// Positive elements `e_0, …, e_T` with thresholds and the step parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TowerModel {
    pub n: usize,
    pub elements: Vec<HermitianMatrix>,
    pub epsilons: Vec<f64>,
    pub l: usize,
    pub k: usize,
    /// Commutator count of the in-block step.
    pub m: usize,
    /// `δ_1, …, δ_T`.
    pub deltas: Vec<f64>,
}

/// Per-stage ranks used by the rank condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRanks {
    pub ramp: usize,
    pub positive_part: usize,
}

impl TowerModel {
    pub fn depth(&self) -> usize {
        self.elements.len().saturating_sub(1)
    }

    pub fn params(&self, i: usize) -> StepParams {
        StepParams {
            l: self.l,
            k: self.k,
            epsilon: self.epsilons[i],
        }
    }

    /// `(e_i − ε_i)₊`.
    pub fn positive_part(&self, i: usize) -> Result<HermitianMatrix> {
        let eps = self.epsilons[i];
        Ok(psd_eig(&self.elements[i])?.apply(|t| (t - eps).max(0.0)))
    }

    pub fn ranks(&self) -> Result<Vec<StageRanks>> {
        self.elements
            .iter()
            .zip(&self.epsilons)
            .map(|(e, &eps)| {
                let eig = psd_eig(e)?;
                let ramp = SpectralRamp::new(eps)?;
                Ok(StageRanks {
                    ramp: range_basis(&eig, |t| ramp.value(t)).0.n_cols(),
                    positive_part: range_basis(&eig, |t| (t - eps).max(0.0)).0.n_cols(),
                })
            })
            .collect()
    }

    /// Orthogonality of `e_i, e_j` for `i ≠ j ≥ 1`, and the rank condition
    /// `L·rank g(e_i) ≤ (L−1)·rank (e_i−ε_i)₊ + K·rank (e_{i+1}−ε_{i+1})₊`.
    pub fn validate(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(Error::invalid("blocks", "tower needs at least one element"));
        }
        if self.l == 0 || self.k == 0 || self.m == 0 {
            return Err(Error::invalid("L", "L, K and M must be positive"));
        }
        if self.epsilons.len() != self.elements.len() {
            return Err(Error::invalid("epsilon", "one threshold per element"));
        }
        if self.deltas.len() < self.depth() || self.deltas.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::invalid("delta", "need a positive δ for every stage"));
        }
        for (i, e) in self.elements.iter().enumerate() {
            if e.n() != self.n {
                return Err(Error::invalid(format!("blocks[{i}]"), "size does not match the ambient size"));
            }
        }
        for i in 1..self.elements.len() {
            for j in i + 1..self.elements.len() {
                let d = (self.elements[i].as_matrix() * self.elements[j].as_matrix()).operator_norm();
                if d > ORTHOGONALITY_TOL {
                    return Err(Error::precondition(format!("e_{i} and e_{j} are not orthogonal: ‖e_i e_j‖ = {d:e}")));
                }
            }
        }
        let ranks = self.ranks()?;
        for i in 0..self.depth() {
            let lhs = self.l * ranks[i].ramp;
            let rhs = (self.l - 1) * ranks[i].positive_part + self.k * ranks[i + 1].positive_part;
            if lhs > rhs {
                return Err(Error::precondition(format!("rank condition fails at stage {i}: {lhs} > {rhs}")));
            }
        }
        Ok(())
    }
}

/// A diagonal block of a tower: an explicit positive matrix, or a random
/// positive matrix of given size and rank with nonzero eigenvalues in `[0.75, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BlockSpec {
    Rank { size: usize, rank: usize },
    Matrix(HermitianMatrix),
}

/// JSON description of a block-diagonal tower.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    pub blocks: Vec<BlockSpec>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M", default = "one")]
    pub m: usize,
    /// Defaults to `δ_i = 2^{−i}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
}

fn default_epsilon() -> f64 {
    0.5
}

fn one() -> usize {
    1
}

impl TowerSpec {
    /// Blocks of equal size and rank: `depth + 1` blocks, `δ_i = 2^{−i}`.
    pub fn uniform(depth: usize, size: usize, ranks: &[usize], l: usize, k: usize) -> Self {
        TowerSpec {
            blocks: (0..=depth)
                .map(|i| BlockSpec::Rank {
                    size,
                    rank: ranks[i.min(ranks.len() - 1)],
                })
                .collect(),
            epsilon: 0.5,
            l,
            k,
            m: 1,
            delta: None,
        }
    }

    /// Places the blocks along the diagonal; random blocks draw from `rng`.
    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TowerModel> {
        let mut sizes = Vec::with_capacity(self.blocks.len());
        let mut mats = Vec::with_capacity(self.blocks.len());
        for (i, b) in self.blocks.iter().enumerate() {
            let m = match b {
                BlockSpec::Matrix(h) => h.clone(),
                BlockSpec::Rank { size, rank } => {
                    if rank > size || *size == 0 {
                        return Err(Error::invalid(format!("blocks[{i}]"), "need 0 ≤ rank ≤ size and size ≥ 1"));
                    }
                    let spectrum: Vec<f64> = (0..*size)
                        .map(|s| if s < *rank { rng.random_range(0.75..=1.0) } else { 0.0 })
                        .collect();
                    random_with_spectrum(rng, &spectrum)
                }
            };
            sizes.push(m.n());
            mats.push(m);
        }
        let n: usize = sizes.iter().sum();
        let mut offset = 0;
        let elements = mats
            .iter()
            .map(|m| {
                let mut full = ComplexMatrix::zeros(n, n);
                full.set_block(offset, offset, m.as_matrix());
                offset += m.n();
                HermitianMatrix::hermitian_part(&full)
            })
            .collect::<Vec<_>>();
        let depth = elements.len().saturating_sub(1);
        let deltas = match &self.delta {
            Some(d) => d.clone(),
            None => (1..=depth).map(|i| 0.5f64.powi(i as i32)).collect(),
        };
        let tower = TowerModel {
            n,
            epsilons: vec![self.epsilon; elements.len()],
            elements,
            l: self.l,
            k: self.k,
            m: self.m,
            deltas,
        };
        tower.validate()?;
        Ok(tower)
    }
}

/// Random trace-zero Hermitian element of the hereditary subalgebra of `(e_0 − ε_0)₊`.
pub fn random_start<R: Rng + ?Sized>(rng: &mut R, tower: &TowerModel) -> Result<ComplexMatrix> {
    let q = positive_range(&tower.positive_part(0)?)?;
    let r = q.n_cols();
    if r == 0 {
        return Ok(ComplexMatrix::zeros(tower.n, tower.n));
    }
    let h = random_hermitian(rng, r);
    let shift = h.real_trace() / r as f64;
    let traceless = h.as_matrix() - &ComplexMatrix::identity(r).scale(shift);
    Ok(traceless.conjugate_by(&q))
}

/// How the in-block step treats its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InnerStep {
    /// Decompose the whole block element; the iteration ends once nothing is left.
    #[default]
    Exact,
    /// Decompose all but a `δ_i/2`-sized multiple, so every stage of the
    /// iteration runs.
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub input_norm: f64,
    pub step_commutators: usize,
    pub step_remainder_norm: f64,
    pub inner_commutators: usize,
    pub remainder_norm: f64,
    pub neumann_iterations: usize,
    pub step_report: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub name: String,
    /// Stage numbers of the members.
    pub members: Vec<usize>,
    pub collapsed_count: usize,
    pub max_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FackResult {
    pub decomposition: CommutatorDecomposition,
    pub stages: Vec<StageRecord>,
    pub families: Vec<FamilyRecord>,
    /// `N = L(L+K−1)`.
    pub step_count: usize,
    /// `N + max(M, N)`.
    pub statement_count_bound: usize,
    /// `2N + max(M, N)`: the count of `S_1 + u + v` when every stage is nonzero.
    pub proof_count_bound: usize,
    pub mode: InnerStep,
}

/// Relative size below which a remainder counts as zero in exact mode.
pub const ZERO_REMAINDER: f64 = 1e-11;

fn inner_step(
    z: &ComplexMatrix,
    q: &ComplexMatrix,
    keep: f64,
) -> Result<(Option<ComplexMatrix>, ComplexMatrix)> {
    // z lives in q·M_r·q*; decompose (1 − keep)·(traceless part) there.
    let r = q.n_cols();
    if r == 0 || z.is_zero() {
        return Ok((None, z.clone()));
    }
    let small = HermitianMatrix::hermitian_part(&z.compress(q));
    let shift = small.real_trace() / r as f64;
    let traceless = small.as_matrix() - &ComplexMatrix::identity(r).scale(shift);
    let target = HermitianMatrix::hermitian_part(&traceless.scale(1.0 - keep));
    if keep >= 1.0 || target.is_zero() {
        return Ok((None, z.clone()));
    }
    let x_small = match self_commutator_decompose(&target)?.factors {
        Factors::SelfCommutators(mut v) => v.remove(0),
        Factors::General(_) => unreachable!("self-commutator decomposition"),
    };
    let x = x_small.conjugate_by(q);
    let remainder = z - &commutator(&x.adjoint(), &x)?;
    Ok((Some(x), remainder))
}

/// Truncated iteration down the tower.
///
/// Stage `i` applies the decomposition step to the current remainder with
/// `a = e_{i−1}`, `b = (e_i − ε_i)₊`, producing `S_i` and `z_i`, then writes
/// `z_i` as a self-commutator `T_i` inside the block of `e_i` plus a remainder.
/// Afterwards `{S_odd}`, `{S_even}` and `{T_i}` are each collapsed index by
/// index into single commutators.
pub fn fack_iterate(z0: &ComplexMatrix, tower: &TowerModel, depth: usize, mode: InnerStep) -> Result<FackResult> {
    fack_iterate_with(z0, tower, depth, mode, Exec::default())
}

pub fn fack_iterate_with(
    z0: &ComplexMatrix,
    tower: &TowerModel,
    depth: usize,
    mode: InnerStep,
    exec: Exec,
) -> Result<FackResult> {
    tower.validate()?;
    if depth > tower.depth() {
        return Err(Error::invalid(
            "depth",
            format!("depth {depth} exceeds the tower depth {}", tower.depth()),
        ));
    }
    let n = tower.n;
    if z0.n_rows() != n || z0.n_cols() != n {
        return Err(Error::invalid("z0", format!("expected a {n}x{n} matrix")));
    }
    let norm_z0 = z0.operator_norm();
    let q0 = positive_range(&tower.positive_part(0)?)?;
    let outside = compression_defect(z0, &q0);
    if outside > 1e-8 * norm_z0 {
        return Err(Error::precondition(format!(
            "z0 is not in the hereditary subalgebra of (e_0 − ε_0)₊: ‖z − PzP‖ = {outside:e}"
        )));
    }
    let tr = z0.trace();
    if tr.norm() > 1e-9 * n as f64 * norm_z0 {
        return Err(Error::invalid("z0", format!("trace not zero: {} + {}i", tr.re, tr.im)));
    }

    let step_count = tower.l * (tower.l + tower.k - 1);
    let mut s_terms: Vec<Vec<(ComplexMatrix, ComplexMatrix)>> = Vec::new();
    let mut t_terms: Vec<(usize, (ComplexMatrix, ComplexMatrix))> = Vec::new();
    let mut stages = Vec::new();
    let mut current = z0.clone();
    let zero_level = ZERO_REMAINDER * norm_z0.max(1.0);

    for stage in 1..=depth {
        let input_norm = current.operator_norm();
        if mode == InnerStep::Exact && input_norm <= zero_level {
            break;
        }
        let b = tower.positive_part(stage)?;
        let step: TrapecioResult =
            trapecio_step_with(&current, &tower.elements[stage - 1], &b, tower.params(stage - 1), exec)?;
        if !step.report.passed() {
            let failed: Vec<String> = step.report.failures().map(|c| c.name.clone()).collect();
            return Err(Error::precondition(format!("stage {stage} step failed: {}", failed.join(", "))));
        }
        let z_norm = step.z.operator_norm();
        let keep = match mode {
            InnerStep::Exact => 0.0,
            InnerStep::Approximate if z_norm > 0.0 => (tower.deltas[stage - 1] / (2.0 * z_norm)).min(1.0),
            InnerStep::Approximate => 1.0,
        };
        let q = step.witness.b_range.clone();
        let (x, remainder) = inner_step(&step.z, &q, keep)?;
        let inner = usize::from(x.is_some());
        if let Some(x) = x {
            t_terms.push((stage, (x.adjoint(), x)));
        }
        stages.push(StageRecord {
            stage,
            input_norm,
            step_commutators: step.commutators.len(),
            step_remainder_norm: z_norm,
            inner_commutators: inner,
            remainder_norm: remainder.operator_norm(),
            neumann_iterations: step.neumann_iterations,
            step_report: step.report.clone(),
        });
        s_terms.push(step.commutators);
        current = remainder;
    }

    let mut families = Vec::new();
    let mut pairs = Vec::new();
    let odd: Vec<usize> = (0..s_terms.len()).step_by(2).collect();
    let even: Vec<usize> = (1..s_terms.len()).step_by(2).collect();
    for (name, idx) in [("S_odd", odd), ("S_even", even)] {
        if idx.is_empty() {
            continue;
        }
        let members: Vec<_> = idx.iter().map(|&i| s_terms[i].clone()).collect();
        let collapsed = collapse_indexwise(n, &members, ORTHOGONALITY_TOL)?;
        push_family(&mut families, &mut pairs, name, idx.iter().map(|i| i + 1).collect(), collapsed);
    }
    if !t_terms.is_empty() {
        let members: Vec<_> = t_terms.iter().map(|(_, p)| vec![p.clone()]).collect();
        let collapsed = collapse_indexwise(n, &members, ORTHOGONALITY_TOL)?;
        push_family(&mut families, &mut pairs, "T", t_terms.iter().map(|t| t.0).collect(), collapsed);
    }

    let mut residual = z0.clone();
    for (c, d) in &pairs {
        residual -= &commutator(c, d)?;
    }
    let statement = step_count + tower.m.max(step_count);
    let proof = 2 * step_count + tower.m.max(step_count);
    let count_bound = match mode {
        InnerStep::Exact => statement,
        InnerStep::Approximate => proof,
    };
    let residual_bound = if depth == 0 { norm_z0 } else { tower.deltas[depth - 1] };
    let delta_max = tower.deltas.iter().take(depth).copied().fold(0.0, f64::max);
    let norm_bound = tower.k as f64 * INNER_NORM_CONSTANT * norm_z0.max(delta_max);
    let claimed_bounds = vec![
        ClaimedBound::new("residual", BoundKind::ResidualNorm, residual_bound, 1e-12 * norm_z0.max(1.0)),
        ClaimedBound::new("commutator_count", BoundKind::CommutatorCount, count_bound as f64, 0.0),
        ClaimedBound::new("factor_norm_product", BoundKind::MaxFactorSize, norm_bound, 1e-8),
    ];
    Ok(FackResult {
        decomposition: CommutatorDecomposition {
            factors: Factors::General(pairs),
            residual,
            claimed_bounds,
        },
        stages,
        families,
        step_count,
        statement_count_bound: statement,
        proof_count_bound: proof,
        mode,
    })
}

fn push_family(
    families: &mut Vec<FamilyRecord>,
    pairs: &mut Vec<(ComplexMatrix, ComplexMatrix)>,
    name: &str,
    members: Vec<usize>,
    collapsed: Vec<crate::selfcomm::Collapsed>,
) {
    let max_defect = collapsed.iter().map(|c| c.max_defect).fold(0.0, f64::max);
    families.push(FamilyRecord {
        name: name.to_string(),
        members,
        collapsed_count: collapsed.len(),
        max_defect,
    });
    pairs.extend(collapsed.into_iter().map(|c| (c.c, c.d)));
}

impl FackResult {
    /// Orthogonality checks of every collapsed family, as bound checks.
    pub fn collapse_checks(&self) -> Vec<BoundCheck> {
        self.families
            .iter()
            .map(|f| BoundCheck::new(format!("collapse_defect[{}]", f.name), 0.0, f.max_defect, ORTHOGONALITY_TOL))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.decomposition.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{verify_decomposition, Tolerances};
    use crate::rng::seeded;

    fn setup(seed: u64, spec: &TowerSpec) -> (TowerModel, ComplexMatrix) {
        let mut rng = seeded(seed);
        let tower = spec.build(&mut rng).unwrap();
        let z0 = random_start(&mut rng, &tower).unwrap();
        (tower, z0)
    }

    #[test]
    fn depth_zero_is_identity() {
        let (tower, z0) = setup(1, &TowerSpec::uniform(2, 2, &[1], 1, 1));
        let r = fack_iterate(&z0, &tower, 0, InnerStep::Exact).unwrap();
        assert_eq!(r.count(), 0);
        assert_eq!(r.decomposition.residual, z0);
    }

    #[test]
    fn exact_mode_single_pair_tower() {
        let (tower, z0) = setup(2, &TowerSpec::uniform(4, 2, &[2], 1, 1));
        let r = fack_iterate(&z0, &tower, 4, InnerStep::Exact).unwrap();
        assert!(r.count() <= 2, "count {}", r.count());
        let rep = verify_decomposition(&z0, &r.decomposition, &Tolerances::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep);
        assert!(rep.residual_norm <= 1.0 / 16.0);
        assert!(r.collapse_checks().iter().all(|c| c.pass));
    }

    #[test]
    fn exact_mode_with_k_two() {
        let spec = TowerSpec::uniform(3, 3, &[2, 1, 1, 1], 1, 2);
        let (tower, z0) = setup(3, &spec);
        let r = fack_iterate(&z0, &tower, 3, InnerStep::Exact).unwrap();
        assert_eq!(r.statement_count_bound, 4);
        let rep = verify_decomposition(&z0, &r.decomposition, &Tolerances::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep);
    }

    #[test]
    fn approximate_mode_runs_every_stage() {
        let (tower, z0) = setup(4, &TowerSpec::uniform(3, 2, &[2], 1, 1));
        let r = fack_iterate(&z0, &tower, 3, InnerStep::Approximate).unwrap();
        assert_eq!(r.stages.len(), 3);
        assert!(r.count() <= r.proof_count_bound);
        let rep = verify_decomposition(&z0, &r.decomposition, &Tolerances::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep);
        assert!(r.collapse_checks().iter().all(|c| c.pass));
    }

    #[test]
    fn rejects_rank_failure_and_deep_request() {
        let mut rng = seeded(5);
        let bad = TowerSpec::uniform(1, 2, &[2, 1], 1, 1);
        assert!(bad.build(&mut rng).unwrap_err().to_string().contains("rank condition"));
        let (tower, z0) = setup(6, &TowerSpec::uniform(1, 2, &[1], 1, 1));
        assert!(fack_iterate(&z0, &tower, 2, InnerStep::Exact).is_err());
    }
}
