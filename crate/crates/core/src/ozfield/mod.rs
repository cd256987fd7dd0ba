//! Matrix-valued piecewise-linear fields on simplicial complexes, decomposed
//! into one self-commutator per color of a hat-function partition of unity.

mod complex;
mod decompose;
mod field;
mod refine;

pub use complex::{barycentric_subdivide, greedy_coloring, SimplicialComplex, VertexColoring};
pub use decompose::{
    decompose_field, decompose_field_with, evaluate_sum, measure, FieldDecomposition, FieldOptions,
    SqrtWeightedFactor, VertexTerm,
};
pub use field::{
    is_trace_zero_field, phi_k, psi_k, sample_grid, GridPoint, SimplicialField, DEFAULT_GRID_ORDER, TRACE_TOL,
};
pub use refine::{circle_refinement, circle_refinement_study, circle_target, RefinementLevel};
