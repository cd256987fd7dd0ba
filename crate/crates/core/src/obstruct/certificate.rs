use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use super::bundle::BundleExpr;
use super::ring::{parse_subset_key, subset_key, SquareFreeClass};
use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, C64};
use crate::ozfield::{barycentric_subdivide, SimplicialComplex, SimplicialField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// `[1_X] ≰ n[q]`.
    OneNotBelowNq,
    /// `diag(p, −q)` is at distance at least 1 from every sum of `m` self-commutators.
    DistanceLowerBound,
}

/// A claim backed by an Euler class computation.
///
/// A nonzero Euler class of `q^{⊕n}` rules out a nowhere-vanishing section,
/// hence rules out `[1_X] ≤ n[q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionCertificate {
    pub kind: CertificateKind,
    pub params: Map<String, Value>,
    pub euler_class: SquareFreeClass,
    pub verdict: bool,
    pub paper_ref: String,
    /// Hypothesis that failed, when `verdict` is false.
    pub failing_hypothesis: Option<String>,
}

const REF_ONE_NOT_BELOW: &str = "Euler class obstruction: [1_X] <= n[q] forces a nowhere-vanishing section of q^n";
const REF_DISTANCE: &str =
    "distance obstruction: [p] <= n[1_X] and [1_X] not <= nm[q] keep diag(p, -q) at distance >= 1 from m self-commutators";

#[derive(Serialize, Deserialize)]
struct CertificateRepr {
    kind: CertificateKind,
    params: Map<String, Value>,
    euler_class: BTreeMap<String, String>,
    verdict: bool,
    paper_ref: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    failing_hypothesis: Option<String>,
}

impl Serialize for ObstructionCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateRepr {
            kind: self.kind,
            params: self.params.clone(),
            euler_class: self
                .euler_class
                .coefficients()
                .iter()
                .map(|(&m, c)| (subset_key(m), c.to_string()))
                .collect(),
            verdict: self.verdict,
            paper_ref: self.paper_ref.clone(),
            failing_hypothesis: self.failing_hypothesis.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ObstructionCertificate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = CertificateRepr::deserialize(deserializer)?;
        let m = r
            .params
            .get("variable_count")
            .and_then(Value::as_u64)
            .ok_or_else(|| D::Error::custom("params.variable_count missing"))? as usize;
        let mut class = SquareFreeClass::zero(m).map_err(D::Error::custom)?;
        for (k, v) in &r.euler_class {
            let mask = parse_subset_key(k, m).map_err(D::Error::custom)?;
            let c: BigInt = v.parse().map_err(|_| D::Error::custom(format!("bad coefficient {v:?}")))?;
            class = &class + &SquareFreeClass::monomial(m, mask, c).map_err(D::Error::custom)?;
        }
        Ok(ObstructionCertificate {
            kind: r.kind,
            params: r.params,
            euler_class: class,
            verdict: r.verdict,
            paper_ref: r.paper_ref,
            failing_hypothesis: r.failing_hypothesis,
        })
    }
}

impl ObstructionCertificate {
    /// Recomputes the certificate from its recorded parameters.
    pub fn recheck(&self) -> Result<ObstructionCertificate> {
        let bundle = |key: &str| -> Result<BundleExpr> {
            let v = self
                .params
                .get(key)
                .ok_or_else(|| Error::invalid(format!("params.{key}"), "missing"))?;
            serde_json::from_value(v.clone()).map_err(|e| Error::invalid(format!("params.{key}"), e.to_string()))
        };
        let int = |key: &str| -> Result<usize> {
            self.params
                .get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::invalid(format!("params.{key}"), "missing or not an integer"))
        };
        match self.kind {
            CertificateKind::OneNotBelowNq => obstruction_certificate(&bundle("q")?, int("n")?),
            CertificateKind::DistanceLowerBound => {
                distance_lower_bound_cert(&bundle("p")?, &bundle("q")?, int("n")?, int("m")?)
            }
        }
    }
}

/// Euler class of `q^{⊕n}`; the verdict `[1_X] ≰ n[q]` holds when it is nonzero.
pub fn obstruction_certificate(q: &BundleExpr, n: usize) -> Result<ObstructionCertificate> {
    let sum = q.repeat(n)?;
    let class = sum.euler_class()?;
    let verdict = !class.is_zero();
    let mut params = Map::new();
    params.insert("variable_count".into(), json!(q.variable_count));
    params.insert("n".into(), json!(n));
    params.insert("q".into(), serde_json::to_value(q).expect("bundle serializes"));
    params.insert("rank".into(), json!(sum.rank()));
    Ok(ObstructionCertificate {
        kind: CertificateKind::OneNotBelowNq,
        params,
        euler_class: class,
        verdict,
        paper_ref: REF_ONE_NOT_BELOW.into(),
        failing_hypothesis: (!verdict).then(|| format!("Euler class of q^{{⊕{n}}} vanishes")),
    })
}

/// Checks `[p] ≤ n[1_X]` via the trivialization rank of `p`, and
/// `[1_X] ≰ nm[q]` via the Euler class of `q^{⊕nm}`.
pub fn distance_lower_bound_cert(
    p: &BundleExpr,
    q: &BundleExpr,
    n: usize,
    m: usize,
) -> Result<ObstructionCertificate> {
    p.validate()?;
    if p.variable_count != q.variable_count {
        return Err(Error::invalid("q", "p and q live over different spaces"));
    }
    if m == 0 || n == 0 {
        return Err(Error::invalid("m", "n and m must be positive"));
    }
    let inner = obstruction_certificate(q, n * m)?;
    let triv = p.trivialization_rank();
    let first = triv <= BigInt::from(n);
    let failing = if !first {
        Some(format!("[p] <= n[1_X]: trivialization rank {triv} exceeds n = {n}"))
    } else if !inner.verdict {
        Some(format!("[1_X] not <= nm[q]: Euler class of q^{{⊕{}}} vanishes", n * m))
    } else {
        None
    };
    let mut params = Map::new();
    params.insert("variable_count".into(), json!(q.variable_count));
    params.insert("n".into(), json!(n));
    params.insert("m".into(), json!(m));
    params.insert("p".into(), serde_json::to_value(p).expect("bundle serializes"));
    params.insert("q".into(), serde_json::to_value(q).expect("bundle serializes"));
    params.insert("p_trivialization_rank".into(), json!(triv.to_string()));
    Ok(ObstructionCertificate {
        kind: CertificateKind::DistanceLowerBound,
        params,
        euler_class: inner.euler_class,
        verdict: failing.is_none(),
        paper_ref: REF_DISTANCE.into(),
        failing_hypothesis: failing,
    })
}

/// Bott projection `P(x) = (1 + x₁σ₁ + x₂σ₂ + x₃σ₃)/2` at a unit vector `x`.
pub fn bott_projection(x: &[f64]) -> ComplexMatrix {
    let (a, b, c) = (x[0], x[1], x[2]);
    ComplexMatrix::from_rows(&[
        vec![C64::new((1.0 + c) / 2.0, 0.0), C64::new(a / 2.0, -b / 2.0)],
        vec![C64::new(a / 2.0, b / 2.0), C64::new((1.0 - c) / 2.0, 0.0)],
    ])
    .expect("2x2")
}

/// `diag(1_X, −p)` for `p = P^{⊗m}` over `(S²)^m`, which no sum of `m`
/// commutators approaches within distance 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PpExample {
    pub m: usize,
    pub space: String,
    /// Size of the ambient matrices: `1 + 2^m`.
    pub ambient_size: String,
    pub unit_rank: usize,
    pub p_rank: usize,
    pub certificate: ObstructionCertificate,
    pub distance_certificate: ObstructionCertificate,
    /// `m = 1` only: the field on a subdivided octahedron projected to the sphere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<SimplicialField>,
}

pub fn pp_example(m: usize) -> Result<PpExample> {
    if m == 0 {
        return Err(Error::invalid("m", "m must be at least 1"));
    }
    let p = BundleExpr::bott_power(m)?;
    let certificate = obstruction_certificate(&p, m)?;
    let distance_certificate = distance_lower_bound_cert(&BundleExpr::trivial(m, 1)?, &p, 1, m)?;
    let field = if m == 1 { Some(sphere_field()?) } else { None };
    Ok(PpExample {
        m,
        space: format!("(S^2)^{m}"),
        ambient_size: (BigInt::from(1) + (BigInt::from(1) << m)).to_string(),
        unit_rank: 1,
        p_rank: 1,
        certificate,
        distance_certificate,
        field,
    })
}

/// `x ↦ diag(1, −P(x))` sampled at the vertices of the subdivided octahedron.
pub fn sphere_field() -> Result<SimplicialField> {
    let (sub, _) = barycentric_subdivide(&SimplicialComplex::octahedron());
    let pos: Vec<Vec<f64>> = sub
        .positions()
        .expect("octahedron has positions")
        .iter()
        .map(|p| {
            let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            p.iter().map(|x| x / r).collect()
        })
        .collect();
    let sphere = sub.with_positions(pos)?;
    SimplicialField::from_positions(sphere, 3, |x| {
        ComplexMatrix::block_diag(&[ComplexMatrix::identity(1), bott_projection(x).scale(-1.0)])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obstruct::ring::factorial;
    use crate::ozfield::is_trace_zero_field;

    #[test]
    fn bott_over_sphere() {
        let c = obstruction_certificate(&BundleExpr::bott(1, 0).unwrap(), 1).unwrap();
        assert!(c.verdict);
        assert_eq!(c.euler_class, SquareFreeClass::variable(1, 0).unwrap());
    }

    #[test]
    fn exponent_beyond_dimension_fails() {
        let q = BundleExpr::new(2, vec![vec![1, 1]]).unwrap();
        let c = obstruction_certificate(&q, 3).unwrap();
        assert!(!c.verdict && c.euler_class.is_zero());
        assert!(c.failing_hypothesis.is_some());
    }

    #[test]
    fn bott_powers_carry_factorials() {
        for m in 2..=6 {
            let c = obstruction_certificate(&BundleExpr::bott_power(m).unwrap(), m).unwrap();
            assert!(c.verdict);
            assert_eq!(c.euler_class.top_coefficient(), factorial(m as u64));
            assert_eq!(c.euler_class.coefficients().len(), 1);
        }
    }

    #[test]
    fn distance_certificates() {
        let one = BundleExpr::trivial(1, 1).unwrap();
        let bott = BundleExpr::bott(1, 0).unwrap();
        assert!(distance_lower_bound_cert(&one, &bott, 1, 1).unwrap().verdict);
        let bad = distance_lower_bound_cert(&one, &BundleExpr::trivial(1, 1).unwrap(), 1, 1).unwrap();
        assert!(!bad.verdict);
        assert!(bad.failing_hypothesis.unwrap().contains("nm[q]"));
        let too_big = distance_lower_bound_cert(&bott, &bott, 1, 1).unwrap();
        assert!(too_big.failing_hypothesis.unwrap().contains("[p] <= n[1_X]"));
    }

    #[test]
    fn pp_examples() {
        assert!(pp_example(0).is_err());
        let one = pp_example(1).unwrap();
        assert_eq!(one.certificate.euler_class, SquareFreeClass::variable(1, 0).unwrap());
        let field = one.field.as_ref().unwrap();
        assert!(is_trace_zero_field(field));
        assert!((field.sup_norm() - 1.0).abs() < 1e-12);
        let three = pp_example(3).unwrap();
        assert_eq!(three.certificate.euler_class.top_coefficient(), BigInt::from(6));
        assert!(three.distance_certificate.verdict && three.field.is_none());
    }

    #[test]
    fn json_round_trip_rechecks() {
        let c = pp_example(2).unwrap().distance_certificate;
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains(r#""euler_class":{"1,2":"2"}"#), "{s}");
        let back: ObstructionCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.recheck().unwrap(), c);
    }
}
