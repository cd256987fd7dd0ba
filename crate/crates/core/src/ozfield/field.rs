use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::complex::{barycentric_subdivide, SimplicialComplex, VertexColoring};
use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, HermitianMatrix, C64};

/// Default barycentric lattice order of the sample grid.
pub const DEFAULT_GRID_ORDER: usize = 8;

/// A point of a maximal simplex in barycentric coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub simplex: usize,
    pub coords: Vec<f64>,
}

impl GridPoint {
    /// `(vertex, barycentric weight)` pairs of the containing simplex.
    pub fn weights<'a>(&'a self, complex: &'a SimplicialComplex) -> impl Iterator<Item = (usize, f64)> + 'a {
        complex.maximal_simplices()[self.simplex]
            .iter()
            .copied()
            .zip(self.coords.iter().copied())
    }

    /// Hat function `h_v` at this point.
    pub fn hat(&self, complex: &SimplicialComplex, v: usize) -> f64 {
        self.weights(complex).find(|&(w, _)| w == v).map_or(0.0, |(_, t)| t)
    }

    /// Linear interpolation of the vertex positions.
    pub fn position(&self, complex: &SimplicialComplex) -> Option<Vec<f64>> {
        let pos = complex.positions()?;
        let mut p = vec![0.0; pos[0].len()];
        for (v, t) in self.weights(complex) {
            for (acc, x) in p.iter_mut().zip(&pos[v]) {
                *acc += t * x;
            }
        }
        Some(p)
    }
}

/// Barycentric lattice of the given order on every maximal simplex.
///
/// Points on shared faces appear once per containing simplex.
pub fn sample_grid(complex: &SimplicialComplex, order: usize) -> Vec<GridPoint> {
    let order = order.max(1);
    let mut out = Vec::new();
    for (simplex, s) in complex.maximal_simplices().iter().enumerate() {
        let mut parts = vec![0usize; s.len()];
        compositions(order, 0, &mut parts, &mut |p| {
            out.push(GridPoint {
                simplex,
                coords: p.iter().map(|&i| i as f64 / order as f64).collect(),
            })
        });
    }
    out
}

fn compositions(rest: usize, at: usize, parts: &mut [usize], emit: &mut impl FnMut(&[usize])) {
    if at + 1 == parts.len() {
        parts[at] = rest;
        emit(parts);
        return;
    }
    for i in (0..=rest).rev() {
        parts[at] = i;
        compositions(rest - i, at + 1, parts, emit);
    }
}

/// Matrix-valued field, linear on each simplex, given by its vertex values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct SimplicialField {
    complex: SimplicialComplex,
    n: usize,
    values: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    complex: SimplicialComplex,
    n: usize,
    values: BTreeMap<usize, ComplexMatrix>,
}

impl TryFrom<FieldRepr> for SimplicialField {
    type Error = Error;

    fn try_from(r: FieldRepr) -> Result<Self> {
        let count = r.complex.vertex_count();
        if let Some(&v) = r.values.keys().find(|&&v| v >= count) {
            return Err(Error::invalid(format!("values.{v}"), "vertex out of range"));
        }
        let mut values = Vec::with_capacity(count);
        for v in 0..count {
            match r.values.get(&v) {
                Some(m) => values.push(m.clone()),
                None => return Err(Error::invalid(format!("values.{v}"), "missing vertex value")),
            }
        }
        SimplicialField::new(r.complex, r.n, values)
    }
}

impl From<SimplicialField> for FieldRepr {
    fn from(f: SimplicialField) -> Self {
        FieldRepr {
            complex: f.complex,
            n: f.n,
            values: f.values.into_iter().enumerate().collect(),
        }
    }
}

impl SimplicialField {
    pub fn new(complex: SimplicialComplex, n: usize, values: Vec<ComplexMatrix>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "matrix size must be positive"));
        }
        if values.len() != complex.vertex_count() {
            return Err(Error::invalid(
                "values",
                format!("{} values for {} vertices", values.len(), complex.vertex_count()),
            ));
        }
        for (v, m) in values.iter().enumerate() {
            if m.n_rows() != n || m.n_cols() != n {
                return Err(Error::invalid(format!("values.{v}"), format!("expected a {n}x{n} matrix")));
            }
        }
        Ok(SimplicialField { complex, n, values })
    }

    pub fn from_hermitian(complex: SimplicialComplex, values: Vec<HermitianMatrix>) -> Result<Self> {
        let n = values.first().map_or(1, HermitianMatrix::n);
        Self::new(complex, n, values.into_iter().map(HermitianMatrix::into_matrix).collect())
    }

    pub fn constant(complex: SimplicialComplex, value: &ComplexMatrix) -> Self {
        let values = vec![value.clone(); complex.vertex_count()];
        SimplicialField {
            n: value.n_rows(),
            complex,
            values,
        }
    }

    /// Field whose value at each vertex is `f(position)`.
    pub fn from_positions(
        complex: SimplicialComplex,
        n: usize,
        f: impl Fn(&[f64]) -> ComplexMatrix,
    ) -> Result<Self> {
        let pos = complex
            .positions()
            .ok_or_else(|| Error::invalid("complex.positions", "complex has no positions"))?;
        let values = pos.iter().map(|p| f(p)).collect();
        Self::new(complex, n, values)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[ComplexMatrix] {
        &self.values
    }

    pub fn value(&self, v: usize) -> &ComplexMatrix {
        &self.values[v]
    }

    pub fn evaluate(&self, p: &GridPoint) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for (v, t) in p.weights(&self.complex) {
            if t != 0.0 {
                acc += &self.values[v].scale(t);
            }
        }
        acc
    }

    /// `max_v ‖a(v)‖`, which is the sup norm since the norm is convex.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(ComplexMatrix::operator_norm).fold(0.0, f64::max)
    }

    /// Vertex values as Hermitian matrices; fails naming the first bad vertex.
    pub fn hermitian_values(&self) -> Result<Vec<HermitianMatrix>> {
        self.values
            .iter()
            .enumerate()
            .map(|(v, m)| {
                HermitianMatrix::new(m.clone()).map_err(|e| Error::invalid(format!("values.{v}"), e.to_string()))
            })
            .collect()
    }

    /// The same field on the barycentric subdivision, with its dimension coloring.
    pub fn subdivide(&self) -> (SimplicialField, VertexColoring) {
        let (sub, coloring) = barycentric_subdivide(&self.complex);
        let values = self
            .complex
            .faces()
            .iter()
            .map(|f| {
                let mut acc = ComplexMatrix::zeros(self.n, self.n);
                for &v in f {
                    acc += &self.values[v];
                }
                acc.scale(1.0 / f.len() as f64)
            })
            .collect();
        (
            SimplicialField {
                complex: sub,
                n: self.n,
                values,
            },
            coloring,
        )
    }
}

/// Vertex relative trace test used for membership in the trace-zero part.
pub const TRACE_TOL: f64 = 1e-10;

/// True iff `|tr a(v)| ≤ 1e−10 · n · ‖a(v)‖` at every vertex.
///
/// Vertex checks suffice because the trace of a piecewise-linear field is
/// piecewise linear.
pub fn is_trace_zero_field(a: &SimplicialField) -> bool {
    first_trace_violation(a, TRACE_TOL).is_none()
}

pub(crate) fn first_trace_violation(a: &SimplicialField, tol: f64) -> Option<(usize, C64)> {
    a.values.iter().enumerate().find_map(|(v, m)| {
        let tr = m.trace();
        (tr.norm() > tol * a.n as f64 * m.operator_norm()).then_some((v, tr))
    })
}

fn check_color(coloring: &VertexColoring, k: usize) -> Result<()> {
    if k >= coloring.color_count {
        return Err(Error::invalid(
            "color",
            format!("color {k} out of range (color count {})", coloring.color_count),
        ));
    }
    Ok(())
}

/// Values of `a` at the vertices of color `k`, in vertex order.
pub fn psi_k(a: &SimplicialField, coloring: &VertexColoring, k: usize) -> Result<Vec<(usize, ComplexMatrix)>> {
    check_color(coloring, k)?;
    coloring.check_proper(a.complex())?;
    Ok(coloring.class(k).into_iter().map(|v| (v, a.values[v].clone())).collect())
}

/// The field `p ↦ Σ_v h_v(p) b_v` for samples at color-`k` vertices.
///
/// Same-colored vertices have disjoint open stars, so the map is order zero.
pub fn phi_k(
    complex: &SimplicialComplex,
    n: usize,
    samples: &[(usize, ComplexMatrix)],
    coloring: &VertexColoring,
    k: usize,
) -> Result<SimplicialField> {
    check_color(coloring, k)?;
    coloring.check_proper(complex)?;
    let mut values = vec![ComplexMatrix::zeros(n, n); complex.vertex_count()];
    for (i, (v, b)) in samples.iter().enumerate() {
        if *v >= complex.vertex_count() {
            return Err(Error::invalid(format!("samples[{i}]"), format!("vertex {v} out of range")));
        }
        if coloring.colors[*v] != k {
            return Err(Error::invalid(
                format!("samples[{i}]"),
                format!("vertex {v} has color {}, expected {k}", coloring.colors[*v]),
            ));
        }
        values[*v] = b.clone();
    }
    SimplicialField::new(complex.clone(), n, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ozfield::complex::barycentric_subdivide;

    fn sign() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    #[test]
    fn grid_sizes_and_partition_of_unity() {
        let tri = SimplicialComplex::triangle();
        let g = sample_grid(&tri, 8);
        assert_eq!(g.len(), 45);
        for p in &g {
            let s: f64 = (0..3).map(|v| p.hat(&tri, v)).sum();
            assert_eq!(s, 1.0);
        }
        assert_eq!(sample_grid(&SimplicialComplex::circle(3), 8).len(), 27);
    }

    #[test]
    fn psi_on_edge_and_circle() {
        let (sub, col) = barycentric_subdivide(&SimplicialComplex::edge());
        let vals = vec![sign(), sign().scale(2.0), sign().scale(3.0)];
        let a = SimplicialField::new(sub, 2, vals).unwrap();
        let s = psi_k(&a, &col, 0).unwrap();
        assert_eq!(s.iter().map(|p| p.0).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(s[0].1, sign());
        assert!(psi_k(&a, &col, 2).is_err());

        let (f, col) = SimplicialField::constant(SimplicialComplex::circle(3), &sign()).subdivide();
        assert_eq!(psi_k(&f, &col, 0).unwrap().len(), 3);
        assert_eq!(psi_k(&f, &col, 1).unwrap().len(), 3);
    }

    #[test]
    fn phi_supports_and_partition() {
        let (f, col) = SimplicialField::constant(SimplicialComplex::circle(3), &sign()).subdivide();
        let grid = sample_grid(f.complex(), 8);

        let one = phi_k(f.complex(), 2, &[(0, sign())], &col, 0).unwrap();
        assert_eq!(one.value(0), &sign());
        assert!(one.values()[1..].iter().all(ComplexMatrix::is_zero));

        let p = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let q = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let left = phi_k(f.complex(), 2, &[(0, p)], &col, 0).unwrap();
        let right = phi_k(f.complex(), 2, &[(1, q)], &col, 0).unwrap();
        for g in &grid {
            assert!((&left.evaluate(g) * &right.evaluate(g)).is_zero());
        }

        let mut total = ComplexMatrix::zeros(2, 2);
        let g = &grid[5];
        for k in 0..col.color_count {
            let samples = psi_k(&f, &col, k).unwrap();
            total += &phi_k(f.complex(), 2, &samples, &col, k).unwrap().evaluate(g);
        }
        assert!((&total - &sign()).max_abs() < 1e-15);

        assert!(phi_k(f.complex(), 2, &[(3, sign())], &col, 0).is_err());
    }

    #[test]
    fn trace_zero_membership() {
        let c = SimplicialComplex::circle(4);
        assert!(is_trace_zero_field(&SimplicialField::constant(c.clone(), &sign())));
        assert!(!is_trace_zero_field(&SimplicialField::constant(c.clone(), &ComplexMatrix::identity(2))));
        let scaled = SimplicialField::new(c, 2, (0..4).map(|v| sign().scale(v as f64 - 1.3)).collect()).unwrap();
        assert!(is_trace_zero_field(&scaled));
    }

    #[test]
    fn subdivision_preserves_values() {
        let c = SimplicialComplex::triangle();
        let a = SimplicialField::new(c, 2, vec![sign(), sign().scale(-1.0), sign().scale(4.0)]).unwrap();
        let (sub, _) = a.subdivide();
        assert_eq!(sub.value(0), a.value(0));
        // The barycenter is the last face.
        assert!((sub.value(6) - &sign().scale(4.0 / 3.0)).max_abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_and_errors() {
        let a = SimplicialField::constant(SimplicialComplex::edge(), &sign());
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains(r#""values":{"0":"#));
        let back: SimplicialField = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let missing = r#"{"complex":{"vertices":2,"simplices":[[0,1]]},"n":1,"values":{"0":{"n":1,"entries":[[[0,0]]]}}}"#;
        let err = serde_json::from_str::<SimplicialField>(missing).unwrap_err().to_string();
        assert!(err.contains("values.1"), "{err}");
    }
}
