use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Dense complex matrix.
///
/// Storage is delegated to `nalgebra`; indices are `(row, col)` and the JSON
/// form is row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::from_element(rows, cols, ZERO))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        ComplexMatrix(DMatrix::from_fn(rows, cols, |i, j| f(i, j)))
    }

    /// Builds a matrix from rows; all rows must have equal length and finite entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n_rows = rows.len();
        if n_rows == 0 {
            return Err(Error::invalid("entries", "matrix has no rows"));
        }
        let n_cols = rows[0].len();
        if n_cols == 0 {
            return Err(Error::invalid("entries[0]", "matrix has no columns"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::invalid(
                    format!("entries[{i}]"),
                    format!("row has {} entries, expected {n_cols}", row.len()),
                ));
            }
            if let Some(j) = row.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::invalid(format!("entries[{i}][{j}]"), "entry is not finite"));
            }
        }
        Ok(Self::from_fn(n_rows, n_cols, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Matrix unit `e_{ij}` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.0[(i, j)] = ONE;
        m
    }

    pub fn from_inner(inner: DMatrix<C64>) -> Self {
        ComplexMatrix(inner)
    }

    pub fn as_inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn n_rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows() == self.n_cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.n_rows())
            .map(|i| (0..self.n_cols()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        (0..self.n_rows().min(self.n_cols())).map(|i| self.0[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix(self.0.map(|z| z * s))
    }

    pub fn scale_c(&self, s: C64) -> Self {
        ComplexMatrix(self.0.map(|z| z * s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.0.is_empty() || self.is_zero() {
            return 0.0;
        }
        self.singular_values().into_iter().fold(0.0, f64::max)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        if self.0.is_empty() {
            return Vec::new();
        }
        let svd = self.0.clone().svd(false, false);
        svd.singular_values.iter().copied().collect()
    }

    /// Number of singular values above `rel_tol · ‖self‖`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let sv = self.singular_values();
        let top = sv.iter().copied().fold(0.0, f64::max);
        if top == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > rel_tol * top).count()
    }

    /// `‖self − self*‖_max`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Sub-matrix of `rows × cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        ComplexMatrix(self.0.view((r0, c0), (rows, cols)).into_owned())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &ComplexMatrix) {
        self.0
            .view_mut((r0, c0), (block.n_rows(), block.n_cols()))
            .copy_from(&block.0);
    }

    pub fn block_diag(blocks: &[ComplexMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.n_rows()).sum();
        let cols = blocks.iter().map(|b| b.n_cols()).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.n_rows();
            c += b.n_cols();
        }
        out
    }

    /// `self ⊗ 1_copies`, laid out as a block-diagonal matrix of `copies` blocks.
    pub fn amplify(&self, copies: usize) -> Self {
        Self::block_diag(&vec![self.clone(); copies])
    }

    /// Conjugation `u · self · u*`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        &(u * self) * &u.adjoint()
    }

    /// Compression `q* · self · q` for an isometry `q`.
    pub fn compress(&self, q: &ComplexMatrix) -> Self {
        &(&q.adjoint() * self) * q
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.n_rows(), self.n_cols())?;
        for i in 0..self.n_rows() {
            write!(f, "  ")?;
            for j in 0..self.n_cols() {
                let z = self.0[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `xy − yx`.
pub fn commutator(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !x.is_square() || !y.is_square() || x.n_rows() != y.n_rows() {
        return Err(Error::invalid(
            "commutator",
            format!(
                "factors must be square of equal size, got {}x{} and {}x{}",
                x.n_rows(),
                x.n_cols(),
                y.n_rows(),
                y.n_cols()
            ),
        ));
    }
    Ok(&(x * y) - &(y * x))
}

/// `[x*, x] = x*x − xx*`.
pub fn self_commutator(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    commutator(&x.adjoint(), x)
}

pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    a.operator_norm()
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 -= &rhs.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_commutator_is_diagonal() {
        let c = commutator(&ComplexMatrix::unit(2, 0, 1), &ComplexMatrix::unit(2, 1, 0)).unwrap();
        assert_eq!(c, ComplexMatrix::from_real_diag(&[1.0, -1.0]));
    }

    #[test]
    fn self_bracket_vanishes() {
        let x = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(i as f64 - j as f64, (i * j) as f64));
        assert!(commutator(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn commutator_rejects_mismatched_sizes() {
        let err = commutator(&ComplexMatrix::zeros(2, 2), &ComplexMatrix::zeros(3, 3)).unwrap_err();
        assert!(matches!(err, Error::InvalidInput { .. }));
        assert!(commutator(&ComplexMatrix::zeros(2, 3), &ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn operator_norm_examples() {
        assert!((ComplexMatrix::from_real_diag(&[3.0, -1.0]).operator_norm() - 3.0).abs() < 1e-12);
        assert_eq!(ComplexMatrix::zeros(4, 4).operator_norm(), 0.0);
        let swap = &ComplexMatrix::unit(2, 0, 1) + &ComplexMatrix::unit(2, 1, 0);
        assert!((swap.operator_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn from_rows_validates_shape_and_finiteness() {
        let ragged = vec![vec![ONE, ZERO], vec![ONE]];
        assert!(ComplexMatrix::from_rows(&ragged).is_err());
        let nan = vec![vec![C64::new(f64::NAN, 0.0)]];
        match ComplexMatrix::from_rows(&nan) {
            Err(Error::InvalidInput { path, .. }) => assert_eq!(path, "entries[0][0]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rank_of_projection() {
        let p = ComplexMatrix::from_real_diag(&[1.0, 1.0, 0.0, 1e-12]);
        assert_eq!(p.rank(1e-8), 2);
        assert_eq!(ComplexMatrix::zeros(3, 3).rank(1e-8), 0);
    }

    #[test]
    fn blocks_round_trip() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let amp = a.amplify(3);
        assert_eq!(amp.n_rows(), 6);
        assert_eq!(amp.block(2, 2, 2, 2), a);
        assert!(amp.block(0, 2, 2, 2).is_zero());
    }
}
