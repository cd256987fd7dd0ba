use super::ramp::{projection, psd_eig, range_basis, SpectralRamp};
use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, HermitianMatrix, C64};

/// `V` with `V*V = g_{ε/2}(a) ⊗ 1_L` and `VV*` in the hereditary subalgebra of
/// `c = (a − ε)₊ ⊗ 1_{L−1} ⊕ b ⊗ 1_K`.
///
/// `V` is `(L+K−1)·n × L·n`; block `(i, j)` is `v_{i,j}` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct CuntzWitness {
    pub v: ComplexMatrix,
    pub n: usize,
    pub l: usize,
    pub k: usize,
    pub epsilon: f64,
    /// `g_{ε/2}(a)`.
    pub ramp: HermitianMatrix,
    /// Range basis of `(a − ε)₊`.
    pub positive_part_range: ComplexMatrix,
    /// Range basis of `b`.
    pub b_range: ComplexMatrix,
    pub rank_ramp: usize,
    pub rank_positive_part: usize,
    pub rank_b: usize,
}

impl CuntzWitness {
    pub fn rows(&self) -> usize {
        self.l + self.k - 1
    }

    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        self.v.block(i * self.n, j * self.n, self.n, self.n)
    }

    /// `Φ(y) = (1/L) Σ_{i<L−1} Σ_j v_{i,j} y v_{i,j}*`.
    pub fn phi(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for i in 0..self.l - 1 {
            for j in 0..self.l {
                let v = self.block(i, j);
                acc += &(&(&v * y) * &v.adjoint());
            }
        }
        acc.scale(1.0 / self.l as f64)
    }

    /// `‖V*V − g_{ε/2}(a) ⊗ 1_L‖`.
    pub fn gram_defect(&self) -> f64 {
        (&(&self.v.adjoint() * &self.v) - &self.ramp.amplify(self.l)).operator_norm()
    }

    /// `‖(1 − P_c) VV*‖` with `P_c` the range projection of `c`.
    pub fn range_defect(&self) -> f64 {
        let pa = projection(&self.positive_part_range);
        let pb = projection(&self.b_range);
        let mut blocks = vec![pa; self.l - 1];
        blocks.extend(std::iter::repeat_n(pb, self.k));
        let pc = ComplexMatrix::block_diag(&blocks);
        let vv = &self.v * &self.v.adjoint();
        (&vv - &(&pc * &vv)).operator_norm()
    }
}

fn check_params(l: usize, k: usize, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if l == 0 || k == 0 {
        return Err(Error::invalid("L", "L and K must be positive"));
    }
    if a.n() != b.n() {
        return Err(Error::invalid("b", "a and b must have the same size"));
    }
    Ok(())
}

/// Witness of `L[g_{ε/2}(a)] ≤ (L−1)[(a−ε)₊] + K[b]` by ranks.
///
/// `V = W (g_{ε/2}(a) ⊗ 1_L)^{1/2}` where the partial isometry `W` sends the
/// range eigenbasis of `g_{ε/2}(a)` in copy `j` (copies in order, eigenvalues
/// ascending) onto the range eigenbases of the diagonal blocks of `c`, taken in
/// the same order.
pub fn cuntz_witness(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    l: usize,
    k: usize,
    epsilon: f64,
) -> Result<CuntzWitness> {
    check_params(l, k, a, b)?;
    let ramp = SpectralRamp::new(epsilon)?;
    let eig_a = psd_eig(a)?;
    let eig_b = psd_eig(b)?;
    let (g_range, g_values) = range_basis(&eig_a, |t| ramp.value(t));
    let (pos_range, _) = range_basis(&eig_a, |t| (t - epsilon).max(0.0));
    let (b_range, _) = range_basis(&eig_b, |t| t.max(0.0));
    let (rg, ra, rb) = (g_range.n_cols(), pos_range.n_cols(), b_range.n_cols());
    if l * rg > (l - 1) * ra + k * rb {
        return Err(Error::precondition(format!(
            "rank condition fails: L·rank(g(a)) = {} > (L−1)·rank((a−ε)₊) + K·rank(b) = {}·{ra} + {k}·{rb} = {}",
            l * rg,
            l - 1,
            (l - 1) * ra + k * rb
        )));
    }

    let n = a.n();
    let mut targets: Vec<(usize, usize)> = Vec::new(); // (block row, column of basis)
    for i in 0..l + k - 1 {
        let width = if i < l - 1 { ra } else { rb };
        targets.extend((0..width).map(|c| (i, c)));
    }
    let mut v = ComplexMatrix::zeros((l + k - 1) * n, l * n);
    let mut t = 0;
    for j in 0..l {
        for (s, &g) in g_values.iter().enumerate() {
            let (i, c) = targets[t];
            t += 1;
            let target = if i < l - 1 { &pos_range } else { &b_range };
            let w = C64::new(g.sqrt(), 0.0);
            for r in 0..n {
                let tr = target.get(r, c) * w;
                if tr == C64::new(0.0, 0.0) {
                    continue;
                }
                for q in 0..n {
                    let cur = v.get(i * n + r, j * n + q);
                    v.set(i * n + r, j * n + q, cur + tr * g_range.get(q, s).conj());
                }
            }
        }
    }
    Ok(CuntzWitness {
        v,
        n,
        l,
        k,
        epsilon,
        ramp: eig_a.apply(|x| ramp.value(x)),
        positive_part_range: pos_range,
        b_range,
        rank_ramp: rg,
        rank_positive_part: ra,
        rank_b: rb,
    })
}
