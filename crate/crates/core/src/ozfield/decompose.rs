use serde::{Deserialize, Serialize};

use super::complex::{SimplicialComplex, VertexColoring};
use super::field::{first_trace_violation, sample_grid, GridPoint, SimplicialField, DEFAULT_GRID_ORDER, TRACE_TOL};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::matcore::{self_commutator, BoundCheck, ComplexMatrix, VerificationReport};
use crate::selfcomm::{self_commutator_decompose, Factors};

/// `y(p) = Σ_v h_v(p)^{1/2} x_v` over vertices of a single color.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqrtWeightedFactor {
    pub color: usize,
    pub terms: Vec<VertexTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexTerm {
    pub vertex: usize,
    pub x: ComplexMatrix,
}

impl SqrtWeightedFactor {
    /// `terms` must be sorted by vertex.
    pub fn evaluate(&self, complex: &SimplicialComplex, n: usize, p: &GridPoint) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(n, n);
        for (v, t) in p.weights(complex) {
            if t <= 0.0 {
                continue;
            }
            if let Ok(i) = self.terms.binary_search_by_key(&v, |term| term.vertex) {
                acc += &self.terms[i].x.scale(t.sqrt());
            }
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldOptions {
    pub grid_order: usize,
    /// Grid residual tolerance relative to `‖a‖_∞`, and absolute slack on `‖y_k‖²`.
    pub tol: f64,
    pub exec: Exec,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions {
            grid_order: DEFAULT_GRID_ORDER,
            tol: 1e-8,
            exec: Exec::default(),
        }
    }
}

/// One factor per color and the grid-measured report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDecomposition {
    pub dimension: usize,
    pub color_count: usize,
    pub grid_order: usize,
    pub factors: Vec<SqrtWeightedFactor>,
    /// `max_p ‖y_k(p)‖²` per color.
    pub factor_norms_sq: Vec<f64>,
    pub sup_norm: f64,
    pub report: VerificationReport,
}

/// `Σ_k [y_k(p)*, y_k(p)]`.
pub fn evaluate_sum(factors: &[SqrtWeightedFactor], complex: &SimplicialComplex, n: usize, p: &GridPoint) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(n, n);
    for f in factors {
        acc += &self_commutator(&f.evaluate(complex, n, p)).expect("square factors");
    }
    acc
}

/// Decomposes a trace-zero Hermitian field into one self-commutator per color.
///
/// Each vertex value is written as `[x_v*, x_v]`; color `k` contributes
/// `y_k = Σ_{v of color k} h_v^{1/2} x_v`. Same-colored hats have disjoint
/// supports and the hats sum to one, so `Σ_k [y_k*, y_k]` is the linear
/// interpolation of the vertex values.
pub fn decompose_field(a: &SimplicialField, coloring: &VertexColoring) -> Result<FieldDecomposition> {
    decompose_field_with(a, coloring, &FieldOptions::default())
}

pub fn decompose_field_with(
    a: &SimplicialField,
    coloring: &VertexColoring,
    options: &FieldOptions,
) -> Result<FieldDecomposition> {
    coloring.check_proper(a.complex())?;
    let values = a.hermitian_values()?;
    if let Some((v, tr)) = first_trace_violation(a, TRACE_TOL) {
        return Err(Error::invalid(
            format!("values.{v}"),
            format!("trace not zero at vertex {v}: trace = {} + {}i", tr.re, tr.im),
        ));
    }
    let per_vertex = exec::map(options.exec, &values, |h| -> Result<ComplexMatrix> {
        match self_commutator_decompose(h)?.factors {
            Factors::SelfCommutators(mut xs) => Ok(xs.remove(0)),
            Factors::General(_) => unreachable!("self-commutator decomposition"),
        }
    });
    let mut xs = Vec::with_capacity(per_vertex.len());
    for (v, r) in per_vertex.into_iter().enumerate() {
        xs.push(r.map_err(|e| Error::invalid(format!("values.{v}"), e.to_string()))?);
    }
    let factors: Vec<SqrtWeightedFactor> = (0..coloring.color_count)
        .map(|k| SqrtWeightedFactor {
            color: k,
            terms: coloring
                .class(k)
                .into_iter()
                .map(|v| VertexTerm { vertex: v, x: xs[v].clone() })
                .collect(),
        })
        .collect();
    Ok(measure(a, coloring, factors, options))
}

/// Grid measurement of `factors` against `a`.
pub fn measure(
    a: &SimplicialField,
    coloring: &VertexColoring,
    factors: Vec<SqrtWeightedFactor>,
    options: &FieldOptions,
) -> FieldDecomposition {
    let complex = a.complex();
    let n = a.n();
    let grid = sample_grid(complex, options.grid_order);
    let samples = exec::map(options.exec, &grid, |p| {
        let mut sum = ComplexMatrix::zeros(n, n);
        let mut norms = Vec::with_capacity(factors.len());
        for f in &factors {
            let y = f.evaluate(complex, n, p);
            norms.push(y.operator_norm().powi(2));
            sum += &self_commutator(&y).expect("square factors");
        }
        ((&a.evaluate(p) - &sum).operator_norm(), norms)
    });
    let residual = samples.iter().map(|s| s.0).fold(0.0, exec::nan_max);
    let factor_norms_sq: Vec<f64> = (0..factors.len())
        .map(|k| samples.iter().map(|s| s.1[k]).fold(0.0, exec::nan_max))
        .collect();
    let sup_norm = a.sup_norm();

    let mut report = VerificationReport {
        residual_norm: residual,
        bound_checks: Vec::new(),
        commutator_count: factors.len(),
    };
    report.push(BoundCheck::new("grid_residual", 0.0, residual, options.tol * sup_norm));
    report.push(BoundCheck::new(
        "factor_count",
        coloring.color_count as f64,
        factors.len() as f64,
        0.0,
    ));
    for (k, &m) in factor_norms_sq.iter().enumerate() {
        report.push(BoundCheck::new(format!("factor_norm_sq[{k}]"), 2.0 * sup_norm, m, options.tol));
    }
    FieldDecomposition {
        dimension: complex.dimension(),
        color_count: coloring.color_count,
        grid_order: options.grid_order,
        factors,
        factor_norms_sq,
        sup_norm,
        report,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::C64;
    use crate::ozfield::complex::{barycentric_subdivide, greedy_coloring};

    fn sign() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    #[test]
    fn constant_field_on_subdivided_circle() {
        let (a, col) = SimplicialField::constant(SimplicialComplex::circle(3), &sign()).subdivide();
        let d = decompose_field(&a, &col).unwrap();
        assert_eq!(d.factors.len(), 2);
        assert!(d.report.residual_norm <= 1e-10);
        assert!(d.report.passed());
    }

    #[test]
    fn pl_scalar_multiple_is_exact() {
        let (sub, col) = barycentric_subdivide(&SimplicialComplex::circle(5));
        let vals = (0..sub.vertex_count()).map(|v| sign().scale((v as f64 * 0.7).sin())).collect();
        let a = SimplicialField::new(sub, 2, vals).unwrap();
        let d = decompose_field_with(&a, &col, &FieldOptions { grid_order: 16, ..Default::default() }).unwrap();
        assert!(d.report.residual_norm <= 1e-12 * d.sup_norm.max(1.0));
        assert!(d.report.passed());
    }

    #[test]
    fn greedy_coloring_reports_its_count() {
        let c = SimplicialComplex::circle(5);
        let col = greedy_coloring(&c);
        let a = SimplicialField::constant(c, &sign());
        let d = decompose_field(&a, &col).unwrap();
        assert_eq!(d.color_count, 3);
        assert_eq!(d.dimension, 1);
        assert!(d.report.passed());
    }

    #[test]
    fn rejects_vertex_with_trace() {
        let (sub, col) = barycentric_subdivide(&SimplicialComplex::edge());
        let mut vals = vec![sign(); 3];
        vals[2] = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let err = decompose_field(&SimplicialField::new(sub, 2, vals).unwrap(), &col).unwrap_err();
        assert!(err.to_string().contains("vertex 2"), "{err}");
    }

    #[test]
    fn non_hermitian_vertex_is_named() {
        let (sub, col) = barycentric_subdivide(&SimplicialComplex::edge());
        let mut vals = vec![sign(); 3];
        vals[1].set(0, 1, C64::new(1.0, 0.0));
        let err = decompose_field(&SimplicialField::new(sub, 2, vals).unwrap(), &col).unwrap_err();
        assert!(matches!(err, Error::InvalidInput { ref path, .. } if path == "values.1"));
    }
}
