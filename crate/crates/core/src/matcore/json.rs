//! JSON form of matrices: `{"n": int, "entries": [[[re, im], ...], ...]}`,
//! row-major. Rectangular matrices use `"rows"`/`"cols"` in place of `"n"`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::hermitian::HermitianMatrix;
use super::matrix::{ComplexMatrix, C64};

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cols: Option<usize>,
    entries: Vec<Vec<[f64; 2]>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let square = self.is_square();
        let repr = MatrixRepr {
            n: square.then(|| self.n_rows()),
            rows: (!square).then(|| self.n_rows()),
            cols: (!square).then(|| self.n_cols()),
            entries: self
                .rows()
                .into_iter()
                .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let rows: Vec<Vec<C64>> = repr
            .entries
            .iter()
            .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .collect();
        let m = ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)?;
        if let Some(n) = repr.n {
            if m.n_rows() != n || m.n_cols() != n {
                return Err(D::Error::custom(format!(
                    "declared n = {n} but entries are {}x{}",
                    m.n_rows(),
                    m.n_cols()
                )));
            }
        }
        if repr.rows.is_some_and(|r| r != m.n_rows()) || repr.cols.is_some_and(|c| c != m.n_cols()) {
            return Err(D::Error::custom("declared rows/cols do not match entries"));
        }
        Ok(m)
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.as_matrix().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(deserializer)?;
        HermitianMatrix::new(m).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_row_major_entries() {
        let m: ComplexMatrix =
            serde_json::from_str(r#"{"n": 2, "entries": [[[0,0],[1,0]],[[0,0],[0,2]]]}"#).unwrap();
        assert_eq!(m.get(0, 1), C64::new(1.0, 0.0));
        assert_eq!(m.get(1, 1), C64::new(0.0, 2.0));
    }

    #[test]
    fn rejects_declared_size_mismatch() {
        let r: Result<ComplexMatrix, _> = serde_json::from_str(r#"{"n": 3, "entries": [[[1,0]]]}"#);
        assert!(r.is_err());
    }

    #[test]
    fn hermitian_deserialization_checks_symmetry() {
        let r: Result<HermitianMatrix, _> =
            serde_json::from_str(r#"{"n": 2, "entries": [[[0,0],[1,0]],[[0,0],[0,0]]]}"#);
        assert!(r.is_err());
    }

    #[test]
    fn rectangular_round_trip_is_exact() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(0.1 * i as f64, 1.0 / (1.0 + j as f64)));
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"rows\":2"));
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
