use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{commutator, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommutatorKind {
    SelfCommutators,
    GeneralCommutators,
}

/// Factor pairs `(x, y)` of a commutator `[x, y]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPair {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
}

/// A single self-commutator factor `x` of `[x*, x]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfFactor {
    pub x: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factors {
    SelfCommutators(Vec<ComplexMatrix>),
    General(Vec<(ComplexMatrix, ComplexMatrix)>),
}

impl Factors {
    pub fn kind(&self) -> CommutatorKind {
        match self {
            Factors::SelfCommutators(_) => CommutatorKind::SelfCommutators,
            Factors::General(_) => CommutatorKind::GeneralCommutators,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Factors::SelfCommutators(v) => v.len(),
            Factors::General(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-commutator size measure: `‖x‖²` for self-commutators, `‖x‖·‖y‖` otherwise.
    pub fn factor_norms(&self) -> Vec<f64> {
        match self {
            Factors::SelfCommutators(v) => v.iter().map(|x| x.operator_norm().powi(2)).collect(),
            Factors::General(v) => v
                .iter()
                .map(|(x, y)| x.operator_norm() * y.operator_norm())
                .collect(),
        }
    }

    /// Σ of the commutators, as an `n × n` matrix.
    pub fn reconstruct(&self, n: usize) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zeros(n, n);
        match self {
            Factors::SelfCommutators(v) => {
                for x in v {
                    acc += &commutator(&x.adjoint(), x)?;
                }
            }
            Factors::General(v) => {
                for (x, y) in v {
                    acc += &commutator(x, y)?;
                }
            }
        }
        Ok(acc)
    }

    /// General-commutator view: `[x*, x]` becomes the pair `(x*, x)`.
    pub fn into_pairs(self) -> Vec<(ComplexMatrix, ComplexMatrix)> {
        match self {
            Factors::SelfCommutators(v) => v.into_iter().map(|x| (x.adjoint(), x)).collect(),
            Factors::General(v) => v,
        }
    }

    fn check_dims(&self, n: usize) -> Result<()> {
        let ok = |m: &ComplexMatrix| m.n_rows() == n && m.n_cols() == n;
        let bad = match self {
            Factors::SelfCommutators(v) => v.iter().position(|x| !ok(x)),
            Factors::General(v) => v.iter().position(|(x, y)| !ok(x) || !ok(y)),
        };
        match bad {
            Some(i) => Err(Error::invalid(
                format!("factors[{i}]"),
                format!("factor dimensions do not match the {n}x{n} element"),
            )),
            None => Ok(()),
        }
    }
}

/// What a claimed bound measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `max ‖xᵢ‖²` over self-commutator factors, or `max ‖xᵢ‖·‖yᵢ‖` over pairs.
    MaxFactorSize,
    /// `‖a − Σ commutators‖`.
    ResidualNorm,
    /// Number of commutators.
    CommutatorCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimedBound {
    pub name: String,
    pub kind: BoundKind,
    pub bound: f64,
    pub tolerance: f64,
}

impl ClaimedBound {
    pub fn new(name: impl Into<String>, kind: BoundKind, bound: f64, tolerance: f64) -> Self {
        ClaimedBound {
            name: name.into(),
            kind,
            bound,
            tolerance,
        }
    }
}

/// `element = Σ commutators + residual`, with bounds the construction claims.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorDecomposition {
    pub factors: Factors,
    pub residual: ComplexMatrix,
    pub claimed_bounds: Vec<ClaimedBound>,
}

impl CommutatorDecomposition {
    /// No commutators; the whole element is residual.
    pub fn empty(element: &ComplexMatrix, kind: CommutatorKind) -> Self {
        let factors = match kind {
            CommutatorKind::SelfCommutators => Factors::SelfCommutators(Vec::new()),
            CommutatorKind::GeneralCommutators => Factors::General(Vec::new()),
        };
        CommutatorDecomposition {
            factors,
            residual: element.clone(),
            claimed_bounds: Vec::new(),
        }
    }

    pub fn kind(&self) -> CommutatorKind {
        self.factors.kind()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn size(&self) -> usize {
        self.residual.n_rows()
    }

    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        self.factors.reconstruct(self.size())
    }

    pub fn max_factor_size(&self) -> f64 {
        self.factors.factor_norms().into_iter().fold(0.0, f64::max)
    }

    pub(crate) fn check_against(&self, element: &ComplexMatrix) -> Result<()> {
        let n = element.n_rows();
        if !element.is_square() || self.residual.n_rows() != n || self.residual.n_cols() != n {
            return Err(Error::invalid(
                "residual",
                "decomposition size does not match the element",
            ));
        }
        self.factors.check_dims(n)
    }
}

/// JSON form: `{"kind", "factors", "residual", "residual_norm", "bounds", "claimed_bounds"}`.
///
/// `bounds` holds the measured value of each claimed quantity by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub kind: CommutatorKind,
    pub factors: Vec<FactorJson>,
    pub residual: ComplexMatrix,
    pub residual_norm: f64,
    pub bounds: std::collections::BTreeMap<String, f64>,
    pub claimed_bounds: Vec<ClaimedBound>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorJson {
    pub x: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<ComplexMatrix>,
}

impl DecompositionJson {
    pub fn from_decomposition(
        d: &CommutatorDecomposition,
        element: &ComplexMatrix,
    ) -> Result<Self> {
        let report = crate::matcore::verify_decomposition(element, d, &Default::default())?;
        let factors = match &d.factors {
            Factors::SelfCommutators(v) => v
                .iter()
                .map(|x| FactorJson { x: x.clone(), y: None })
                .collect(),
            Factors::General(v) => v
                .iter()
                .map(|(x, y)| FactorJson {
                    x: x.clone(),
                    y: Some(y.clone()),
                })
                .collect(),
        };
        let mut bounds: std::collections::BTreeMap<String, f64> = report
            .bound_checks
            .iter()
            .map(|c| (c.name.clone(), c.measured_value))
            .collect();
        let norm_a = element.operator_norm();
        if d.kind() == CommutatorKind::SelfCommutators && !d.is_empty() && norm_a > 0.0 {
            bounds.insert("norm_sq_over_norm_a".into(), d.max_factor_size() / norm_a);
        }
        Ok(DecompositionJson {
            kind: d.kind(),
            factors,
            residual: d.residual.clone(),
            residual_norm: report.residual_norm,
            bounds,
            claimed_bounds: d.claimed_bounds.clone(),
        })
    }

    pub fn to_decomposition(&self) -> Result<CommutatorDecomposition> {
        let factors = match self.kind {
            CommutatorKind::SelfCommutators => {
                if let Some(i) = self.factors.iter().position(|f| f.y.is_some()) {
                    return Err(Error::invalid(
                        format!("factors[{i}].y"),
                        "self-commutator factors carry only x",
                    ));
                }
                Factors::SelfCommutators(self.factors.iter().map(|f| f.x.clone()).collect())
            }
            CommutatorKind::GeneralCommutators => Factors::General(
                self.factors
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        f.y.clone()
                            .map(|y| (f.x.clone(), y))
                            .ok_or_else(|| Error::invalid(format!("factors[{i}].y"), "missing y"))
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(CommutatorDecomposition {
            factors,
            residual: self.residual.clone(),
            claimed_bounds: self.claimed_bounds.clone(),
        })
    }
}
