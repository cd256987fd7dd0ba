use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;

/// Default bound on the cross products checked by [`collapse_orthogonal`].
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// `(c, d)` with `[c, d] = Σ [cᵢ, dᵢ]`, and the largest cross product seen.
#[derive(Debug, Clone, PartialEq)]
pub struct Collapsed {
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
    pub max_defect: f64,
}

type Relation = (&'static str, fn(&ComplexMatrix, &ComplexMatrix, &ComplexMatrix, &ComplexMatrix) -> ComplexMatrix);

// (cᵢ, dᵢ, cⱼ, dⱼ) ↦ product that must vanish for i ≠ j.
const RELATIONS: [Relation; 7] = [
    ("c_i* d_j", |ci, _, _, dj| &ci.adjoint() * dj),
    ("c_i d_j", |ci, _, _, dj| ci * dj),
    ("c_i* d_j*", |ci, _, _, dj| &ci.adjoint() * &dj.adjoint()),
    ("c_i* c_j", |ci, _, cj, _| &ci.adjoint() * cj),
    ("c_i c_j*", |ci, _, cj, _| ci * &cj.adjoint()),
    ("d_i* d_j", |_, di, _, dj| &di.adjoint() * dj),
    ("d_i d_j*", |_, di, _, dj| di * &dj.adjoint()),
];

/// Sums mutually orthogonal pairs into one commutator.
///
/// Every ordered pair `i ≠ j` is checked against the relations
/// `cᵢ*dⱼ = cᵢdⱼ = cᵢ*dⱼ* = 0`, `cᵢ ⊥ cⱼ`, `dᵢ ⊥ dⱼ`. An empty list gives `(0, 0)`.
pub fn collapse_orthogonal(n: usize, pairs: &[(ComplexMatrix, ComplexMatrix)]) -> Result<Collapsed> {
    collapse_orthogonal_with(n, pairs, ORTHOGONALITY_TOL)
}

pub fn collapse_orthogonal_with(
    n: usize,
    pairs: &[(ComplexMatrix, ComplexMatrix)],
    tol: f64,
) -> Result<Collapsed> {
    for (i, (c, d)) in pairs.iter().enumerate() {
        for m in [c, d] {
            if m.n_rows() != n || m.n_cols() != n {
                return Err(Error::invalid(format!("pairs[{i}]"), format!("expected {n}x{n} factors")));
            }
        }
    }
    let mut max_defect: f64 = 0.0;
    for (i, (ci, di)) in pairs.iter().enumerate() {
        for (j, (cj, dj)) in pairs.iter().enumerate() {
            if i == j {
                continue;
            }
            for (name, product) in RELATIONS {
                let defect = product(ci, di, cj, dj).operator_norm();
                if defect > tol {
                    return Err(Error::precondition(format!(
                        "pairs {i} and {j} are not orthogonal: ‖{name}‖ = {defect:e} > {tol:e}"
                    )));
                }
                max_defect = max_defect.max(defect);
            }
        }
    }
    let mut c = ComplexMatrix::zeros(n, n);
    let mut d = ComplexMatrix::zeros(n, n);
    for (ci, di) in pairs {
        c += ci;
        d += di;
    }
    Ok(Collapsed { c, d, max_defect })
}

/// Collapses a family of commutator sums index by index.
///
/// Member `m` is a list of pairs; shorter members are padded with `(0, 0)`.
/// Output `k` collapses the `k`-th pair of every member, so the members' `k`-th
/// pairs must be mutually orthogonal.
pub fn collapse_indexwise(
    n: usize,
    members: &[Vec<(ComplexMatrix, ComplexMatrix)>],
    tol: f64,
) -> Result<Vec<Collapsed>> {
    let width = members.iter().map(Vec::len).max().unwrap_or(0);
    (0..width)
        .map(|k| {
            let column: Vec<(ComplexMatrix, ComplexMatrix)> = members
                .iter()
                .filter_map(|m| m.get(k).cloned())
                .collect();
            collapse_orthogonal_with(n, &column, tol)
                .map_err(|e| Error::precondition(format!("commutator index {k}: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{commutator, C64};

    fn pair(n: usize, i: usize, j: usize, s: f64) -> (ComplexMatrix, ComplexMatrix) {
        (ComplexMatrix::unit(n, i, j).scale(s), ComplexMatrix::unit(n, j, i))
    }

    #[test]
    fn empty_and_single() {
        let z = collapse_orthogonal(3, &[]).unwrap();
        assert!(z.c.is_zero() && z.d.is_zero());
        let p = pair(2, 0, 1, 2.0);
        let one = collapse_orthogonal(2, std::slice::from_ref(&p)).unwrap();
        assert_eq!((one.c, one.d), p);
    }

    #[test]
    fn disjoint_blocks_reproduce_sum() {
        let p = [pair(4, 0, 1, 1.5), pair(4, 2, 3, -0.5)];
        let r = collapse_orthogonal(4, &p).unwrap();
        let expected = &commutator(&p[0].0, &p[0].1).unwrap() + &commutator(&p[1].0, &p[1].1).unwrap();
        assert!((&commutator(&r.c, &r.d).unwrap() - &expected).max_abs() < 1e-15);
        assert_eq!(r.max_defect, 0.0);
        assert_eq!(expected.get(2, 2), C64::new(-0.5, 0.0));
    }

    #[test]
    fn overlap_names_the_pair() {
        let p = [pair(3, 0, 1, 1.0), pair(3, 1, 2, 1.0)];
        let err = collapse_orthogonal(3, &p).unwrap_err().to_string();
        assert!(err.contains("pairs 1 and 0") && err.contains("c_i* d_j"), "{err}");
    }
}
