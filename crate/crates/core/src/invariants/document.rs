//! Coupling-matrix input document.
//!
//! Either a dense matrix or a sparse entry list:
//!
//! ```json
//! { "labeling": "weight", "Z": [[1, 0], [0, 1]] }
//! { "labeling": "spin", "entries": [{"left": 0, "right": 3, "value": 1}] }
//! ```
//!
//! With `"labeling": "spin"` sparse entries name sectors by spin `j` and are
//! converted to weight indices `a = 2j`. Dense matrices are index-ordered and
//! unaffected by the labeling.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CouplingMatrix;
use crate::error::{Error, Result};
use crate::linalg::IMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Labeling {
    #[default]
    Weight,
    Spin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub left: f64,
    pub right: f64,
    pub value: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingMatrixDocument {
    #[serde(default)]
    pub labeling: Labeling,
    #[serde(rename = "Z", default, skip_serializing_if = "Option::is_none")]
    pub dense: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<MatrixEntry>>,
}

fn label_index(value: f64, labeling: Labeling, size: usize, side: &str) -> Result<usize> {
    let scaled = match labeling {
        Labeling::Weight => value,
        Labeling::Spin => 2.0 * value,
    };
    let rounded = scaled.round();
    if (scaled - rounded).abs() > 1e-9 || rounded < 0.0 || rounded as usize >= size {
        return Err(Error::Parse(format!(
            "{side} label {value} is not a valid {labeling:?} label for {size} sectors"
        )));
    }
    Ok(rounded as usize)
}

impl CouplingMatrixDocument {
    /// Resolves the document against the given label sets. The second value
    /// lists any spin-to-weight conversions that were applied.
    pub fn into_coupling_matrix(
        self,
        left_labels: Vec<String>,
        right_labels: Vec<String>,
    ) -> Result<(CouplingMatrix, Vec<String>)> {
        let (n_l, n_r) = (left_labels.len(), right_labels.len());
        let mut log = Vec::new();
        let z = match (self.dense, self.entries) {
            (Some(rows), None) => crate::linalg::rows_to_matrix(&rows, |&v| v)
                .ok_or_else(|| Error::Parse("Z is not rectangular".into()))?,
            (None, Some(entries)) => {
                let mut z = IMatrix::zeros(n_l, n_r);
                for e in entries {
                    let i = label_index(e.left, self.labeling, n_l, "left")?;
                    let j = label_index(e.right, self.labeling, n_r, "right")?;
                    if self.labeling == Labeling::Spin {
                        log.push(format!(
                            "spin ({}, {}) -> weight ({i}, {j})",
                            e.left, e.right
                        ));
                    }
                    z[(i, j)] += e.value;
                }
                z
            }
            _ => {
                return Err(Error::Parse(
                    "coupling matrix needs exactly one of \"Z\" or \"entries\"".into(),
                ))
            }
        };
        Ok((CouplingMatrix::new(z, left_labels, right_labels)?, log))
    }
}

pub fn load_coupling_matrix(
    path: &Path,
    left_labels: Vec<String>,
    right_labels: Vec<String>,
) -> Result<(CouplingMatrix, Vec<String>)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let doc: CouplingMatrixDocument =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("coupling matrix: {e}")))?;
    doc.into_coupling_matrix(left_labels, right_labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|a| format!("a={a}")).collect()
    }

    #[test]
    fn spin_entries_convert_to_weights() {
        let doc: CouplingMatrixDocument = serde_json::from_str(
            r#"{"labeling":"spin","entries":[
                {"left":0,"right":0,"value":1},{"left":0,"right":3,"value":1},
                {"left":3,"right":0,"value":1},{"left":3,"right":3,"value":1}]}"#,
        )
        .unwrap();
        let (z, log) = doc.into_coupling_matrix(labels(11), labels(11)).unwrap();
        assert_eq!(z.get(0, 6), 1);
        assert_eq!(z.get(6, 6), 1);
        assert_eq!(z.row_major().iter().sum::<u32>(), 4);
        assert_eq!(log.len(), 4);
        assert_eq!(log[1], "spin (0, 3) -> weight (0, 6)");
    }

    #[test]
    fn half_integer_spin_and_out_of_range() {
        let doc = CouplingMatrixDocument {
            labeling: Labeling::Spin,
            dense: None,
            entries: Some(vec![
                MatrixEntry { left: 0.0, right: 0.0, value: 1 },
                MatrixEntry { left: 0.5, right: 0.5, value: 1 },
            ]),
        };
        let (z, _) = doc.clone().into_coupling_matrix(labels(3), labels(3)).unwrap();
        assert_eq!(z.get(1, 1), 1);
        assert!(doc.into_coupling_matrix(labels(1), labels(1)).is_err());

        let weight = CouplingMatrixDocument {
            labeling: Labeling::Weight,
            dense: None,
            entries: Some(vec![MatrixEntry { left: 0.5, right: 0.0, value: 1 }]),
        };
        assert!(weight.into_coupling_matrix(labels(3), labels(3)).is_err());
    }

    #[test]
    fn dense_and_sparse_are_exclusive() {
        let doc: CouplingMatrixDocument =
            serde_json::from_str(r#"{"Z":[[1]],"entries":[]}"#).unwrap();
        assert!(doc.into_coupling_matrix(labels(1), labels(1)).is_err());
        let dense: CouplingMatrixDocument = serde_json::from_str(r#"{"Z":[[1,0],[0,1]]}"#).unwrap();
        let (z, log) = dense.into_coupling_matrix(labels(2), labels(2)).unwrap();
        assert_eq!(z, CouplingMatrix::identity(labels(2)));
        assert!(log.is_empty());
    }
}
