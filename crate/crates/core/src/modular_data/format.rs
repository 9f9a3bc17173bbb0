//! JSON document for modular data.
//!
//! ```json
//! { "labels": ["a=0", "a=1"], "c": 1.0, "h": [0.0, 0.25],
//!   "S": [[{"re": 0.7071, "im": 0.0}, ...], ...],
//!   "T": [[...]] }
//! ```
//!
//! `T` is optional and derived from `h` and `c` when absent.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ModularData;
use crate::error::{Error, Result};
use crate::linalg::{matrix_to_rows, rows_to_matrix, ComplexEntry};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModularDataDocument {
    pub labels: Vec<String>,
    pub c: f64,
    pub h: Vec<f64>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<ComplexEntry>>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<Vec<ComplexEntry>>>,
}

impl From<&ModularData> for ModularDataDocument {
    fn from(md: &ModularData) -> Self {
        ModularDataDocument {
            labels: md.label_names(),
            c: md.central_charge(),
            h: md.weights().to_vec(),
            s: matrix_to_rows(md.s()),
            t: Some(matrix_to_rows(md.t())),
        }
    }
}

impl ModularDataDocument {
    pub fn into_modular_data(self, tol: f64) -> Result<ModularData> {
        let s = rows_to_matrix(&self.s, |&e| e.into())
            .ok_or_else(|| Error::Parse("S is not rectangular".into()))?;
        let t = match &self.t {
            Some(rows) => Some(
                rows_to_matrix(rows, |&e| e.into())
                    .ok_or_else(|| Error::Parse("T is not rectangular".into()))?,
            ),
            None => None,
        };
        ModularData::new(self.labels, self.c, self.h, s, t, tol)
    }
}

pub fn parse_modular_data(text: &str, tol: f64) -> Result<ModularData> {
    let doc: ModularDataDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("modular data: {e}")))?;
    doc.into_modular_data(tol)
}

pub fn load_modular_data(path: &Path, tol: f64) -> Result<ModularData> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_modular_data(&text, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOLERANCE;
    use crate::modular_data::su2_modular_data;

    #[test]
    fn su2_one_round_trips() {
        let md = su2_modular_data(1).unwrap();
        let text = serde_json::to_string(&ModularDataDocument::from(&md)).unwrap();
        let back = parse_modular_data(&text, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(back, md);
    }

    #[test]
    fn t_is_derived_when_absent() {
        let md = su2_modular_data(3).unwrap();
        let mut doc = ModularDataDocument::from(&md);
        doc.t = None;
        let back = doc.into_modular_data(DEFAULT_TOLERANCE).unwrap();
        assert_eq!(back, md);
    }

    #[test]
    fn non_unitary_s_is_rejected() {
        let md = su2_modular_data(1).unwrap();
        let mut doc = ModularDataDocument::from(&md);
        doc.s[1][1].re += 1e-3;
        match doc.into_modular_data(DEFAULT_TOLERANCE) {
            Err(Error::Validation { invariant, residual }) => {
                assert_eq!(invariant, "S unitarity");
                assert!(residual > 1e-4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nonzero_vacuum_weight_is_rejected() {
        let md = su2_modular_data(2).unwrap();
        let mut doc = ModularDataDocument::from(&md);
        doc.h[0] = 0.5;
        doc.t = None;
        match doc.into_modular_data(DEFAULT_TOLERANCE) {
            Err(Error::Validation { invariant, .. }) => assert!(invariant.contains("vacuum weight")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(
            parse_modular_data("{\"labels\": [", DEFAULT_TOLERANCE),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_modular_data(r#"{"labels":["0"],"c":0,"h":[0],"S":[[{"re":1,"im":0}]],"extra":1}"#, DEFAULT_TOLERANCE),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_modular_data(Path::new("/nonexistent/md.json"), DEFAULT_TOLERANCE).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
