//! The run report: one JSON document per invocation with a `results` array,
//! plus a lossy plain-text table view.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraSummary {
    pub source: String,
    pub rank: usize,
    pub central_charge: Option<f64>,
    pub su2_level: Option<u32>,
}

/// Settings that determine the results, embedded so a report can be reproduced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_matching: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry_bound: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_solutions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_search: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub left: AlgebraSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<AlgebraSummary>,
    pub settings: Settings,
    /// Command-specific summary (enumeration statistics and the like).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Value>,
    pub results: Vec<Value>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per result. Drops most of the report; use JSON for the full data.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} (table view is lossy; use --format json for the full report)", self.command);
        let _ = writeln!(out, "# left: {}", self.left.source);
        if let Some(r) = &self.right {
            let _ = writeln!(out, "# right: {}", r.source);
        }
        let _ = writeln!(out, "# tolerance: {:e}", self.settings.tolerance);
        let is_classification = self.results.iter().any(|r| classification_of(r).is_some());
        if is_classification {
            let _ = writeln!(
                out,
                "{:>3}  {:>5}  {:<18} {:<6} {:<7} {:<7} {:<6} {:<6}",
                "#", "level", "type_tag", "ade", "modinv", "normal", "x", "y"
            );
            for (idx, r) in self.results.iter().enumerate() {
                let c = classification_of(r).expect("classification result");
                let flag = |v: &Value| match v.as_bool() {
                    Some(true) => "pass",
                    Some(false) => "fail",
                    None => "-",
                };
                let _ = writeln!(
                    out,
                    "{:>3}  {:>5}  {:<18} {:<6} {:<7} {:<7} {:<6} {:<6}",
                    idx,
                    c["level"].as_u64().map_or("-".to_string(), |k| k.to_string()),
                    c["type_tag"].as_str().unwrap_or("-"),
                    c["ade_name"].as_str().unwrap_or("-"),
                    flag(&c["modular_invariant"]["pass"]),
                    c["normal"].as_bool().map_or("-", |b| if b { "yes" } else { "no" }),
                    flag(&c["statistics_symmetry"]["x_part"]["pass"]),
                    flag(&c["statistics_symmetry"]["y_part"]["pass"]),
                );
            }
        } else {
            for r in &self.results {
                let _ = writeln!(out, "{r}");
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "# note: {note}");
        }
        out
    }
}

fn classification_of(result: &Value) -> Option<&Value> {
    if result.get("type_tag").is_some() {
        Some(result)
    } else {
        result.get("classification")
    }
}

/// Machine-readable error object printed on failure.
pub fn error_document(err: &Error) -> Value {
    let mut body = serde_json::json!({
        "kind": err.kind(),
        "message": err.to_string(),
        "exit_code": err.exit_code(),
    });
    match err {
        Error::SearchBudget { nodes, found, .. } => {
            body["nodes"] = (*nodes).into();
            body["partial_results"] = found.iter().map(|z| serde_json::json!(z.rows())).collect();
        }
        Error::Validation { invariant, residual } => {
            body["invariant"] = invariant.clone().into();
            body["residual"] = (*residual).into();
        }
        _ => {}
    }
    serde_json::json!({ "error": body })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(results: Vec<Value>) -> Report {
        Report {
            command: "check".into(),
            left: AlgebraSummary {
                source: "su2 k=2".into(),
                rank: 3,
                central_charge: Some(1.5),
                su2_level: Some(2),
            },
            right: None,
            settings: Settings {
                tolerance: 1e-9,
                t_matching: None,
                entry_bound: None,
                node_budget: None,
                max_solutions: None,
                block_search: None,
            },
            summary: None,
            results,
            notes: vec![],
        }
    }

    #[test]
    fn json_has_results_array() {
        let v: Value = serde_json::from_str(&report(vec![Value::from(1)]).to_json()).unwrap();
        assert_eq!(v["results"], serde_json::json!([1]));
        assert!(v.get("right").is_none());
        assert_eq!(v["settings"]["tolerance"], 1e-9);
    }

    #[test]
    fn table_marks_itself_lossy() {
        let t = report(vec![serde_json::json!({"type_tag": "diagonal", "level": 2, "ade_name": "A3"})]).to_table();
        assert!(t.lines().next().unwrap().contains("lossy"));
        assert!(t.contains("diagonal") && t.contains("A3"));
    }

    #[test]
    fn budget_error_carries_partial_results() {
        let err = Error::SearchBudget {
            reason: "node budget".into(),
            nodes: 7,
            found: vec![],
        };
        let doc = error_document(&err);
        assert_eq!(doc["error"]["exit_code"], 3);
        assert_eq!(doc["error"]["kind"], "search-budget");
        assert_eq!(doc["error"]["partial_results"], serde_json::json!([]));
    }
}
