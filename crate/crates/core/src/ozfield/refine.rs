use serde::{Deserialize, Serialize};

use super::complex::SimplicialComplex;
use super::decompose::{decompose_field_with, evaluate_sum, FieldOptions};
use super::field::{sample_grid, SimplicialField};
use crate::error::Result;
use crate::exec;
use crate::matcore::{ComplexMatrix, C64};

/// Smooth trace-zero target on the circle, not linear in the angle:
/// `[[cos 3θ, sin 2θ + ½ i sin θ], [conj, −cos 3θ]]`.
pub fn circle_target(theta: f64) -> ComplexMatrix {
    let d = (3.0 * theta).cos();
    let off = C64::new((2.0 * theta).sin(), 0.5 * theta.sin());
    ComplexMatrix::from_rows(&[vec![C64::new(d, 0.0), off], vec![off.conj(), C64::new(-d, 0.0)]])
        .expect("finite entries")
}

fn angle(p: &[f64]) -> f64 {
    p[1].atan2(p[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub level: usize,
    /// Vertices of the subdivided circle.
    pub vertices: usize,
    /// Longest edge of the subdivided circle.
    pub mesh_width: f64,
    /// `max_p ‖target(p) − Σ_k [y_k(p)*, y_k(p)]‖` over the grid.
    pub residual: f64,
    pub factor_count: usize,
}

/// Samples [`circle_target`] on the subdivided `3·2^level`-cycle, decomposes
/// it, and measures the decomposition against the smooth target.
pub fn circle_refinement(level: usize, options: &FieldOptions) -> Result<RefinementLevel> {
    let base = SimplicialComplex::circle(3 << level);
    let (sub, coloring) = super::complex::barycentric_subdivide(&base);
    let a = SimplicialField::from_positions(sub, 2, |p| circle_target(angle(p)))?;
    let d = decompose_field_with(&a, &coloring, options)?;
    let complex = a.complex();
    let grid = sample_grid(complex, options.grid_order);
    let errors = exec::map(options.exec, &grid, |p| {
        let theta = angle(&p.position(complex).expect("circle has positions"));
        (&circle_target(theta) - &evaluate_sum(&d.factors, complex, 2, p)).operator_norm()
    });
    let pos = complex.positions().expect("circle has positions");
    let mesh_width = complex
        .maximal_simplices()
        .iter()
        .map(|s| {
            let (p, q) = (&pos[s[0]], &pos[s[1]]);
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
        })
        .fold(0.0, f64::max);
    Ok(RefinementLevel {
        level,
        vertices: complex.vertex_count(),
        mesh_width,
        residual: errors.into_iter().fold(0.0, exec::nan_max),
        factor_count: d.factors.len(),
    })
}

/// Levels `0..=max_level` of [`circle_refinement`].
pub fn circle_refinement_study(max_level: usize, options: &FieldOptions) -> Result<Vec<RefinementLevel>> {
    (0..=max_level).map(|l| circle_refinement(l, options)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_is_traceless_hermitian() {
        for i in 0..10 {
            let m = circle_target(0.37 * i as f64);
            assert!(m.trace().norm() < 1e-15);
            assert!(m.hermitian_defect() == 0.0);
        }
    }

    #[test]
    fn residual_shrinks_with_mesh() {
        let s = circle_refinement_study(3, &FieldOptions::default()).unwrap();
        for w in s.windows(2) {
            assert!(w[1].residual < 0.6 * w[0].residual, "{s:?}");
        }
        assert!(s.iter().all(|l| l.factor_count == 2));
    }
}
