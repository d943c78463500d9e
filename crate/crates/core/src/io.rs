//! Chart files and output documents.
//!
//! A chart file is JSON:
//!
//! ```json
//! {"dim": 2, "gamma": [{"indices": [1, 1, 1], "poly": "x2"}], "n_work": 6, "h_order": 2}
//! ```
//!
//! Indices are 1-based. Each entry is mirrored to all permutations of its
//! indices, and `gamma_entries` is accepted as a synonym for `gamma`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::parse::parse_poly;
use crate::poly::Poly;
use crate::render::RenderedTerm;

fn default_n_work() -> usize {
    6
}

fn default_h_order() -> usize {
    2
}

/// One connection coefficient `Γ_ijk`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaEntry {
    /// 1-based.
    pub indices: [usize; 3],
    pub poly: String,
}

/// Parsed contents of a chart file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub dim: usize,
    #[serde(default, alias = "gamma_entries")]
    pub gamma: Vec<GammaEntry>,
    #[serde(default = "default_n_work")]
    pub n_work: usize,
    #[serde(default = "default_h_order")]
    pub h_order: usize,
}

impl ChartSpec {
    /// Replaces the truncation orders where given.
    pub fn with_overrides(mut self, n_work: Option<usize>, h_order: Option<usize>) -> Self {
        if let Some(n) = n_work {
            self.n_work = n;
        }
        if let Some(k) = h_order {
            self.h_order = k;
        }
        self
    }

    /// Builds and validates the chart.
    pub fn to_chart(&self) -> Result<Chart> {
        let mut entries: Vec<([usize; 3], Poly)> = Vec::with_capacity(self.gamma.len());
        for (n, e) in self.gamma.iter().enumerate() {
            if let Some(&bad) = e.indices.iter().find(|&&i| i == 0 || i > self.dim) {
                return Err(Error::Validation(format!(
                    "gamma entry {}: index {bad} outside 1..={}",
                    n + 1,
                    self.dim
                )));
            }
            let poly = parse_poly(&e.poly).map_err(|err| match err {
                Error::Parse {
                    line,
                    column,
                    message,
                } => Error::Parse {
                    line,
                    column,
                    message: format!(
                        "in gamma entry {} polynomial {:?}: {message}",
                        n + 1,
                        e.poly
                    ),
                },
                other => other,
            })?;
            let [i, j, k] = e.indices;
            entries.push(([i - 1, j - 1, k - 1], poly));
        }
        Chart::from_entries(self.dim, self.n_work, self.h_order, &entries)
    }
}

/// Parses and validates a chart file. Syntax errors carry the JSON line and
/// column.
pub fn parse_chart(text: &[u8]) -> Result<ChartSpec> {
    let spec: ChartSpec = serde_json::from_slice(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    spec.to_chart()?;
    Ok(spec)
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// `"0"` on success, otherwise a rendered counterexample.
    pub residual: String,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            residual: "0".into(),
        }
    }

    pub fn fail(name: impl Into<String>, residual: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            residual: residual.into(),
        }
    }
}

/// The JSON document written by the command-line driver.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputDocument {
    pub query: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub result_terms: Vec<RenderedTerm>,
    pub checks: Vec<CheckResult>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_chart() {
        let spec = parse_chart(br#"{"dim":2,"gamma":[{"indices":[1,1,1],"poly":"x2"}]}"#).unwrap();
        assert_eq!((spec.n_work, spec.h_order), (6, 2));
        let chart = spec.to_chart().unwrap();
        assert_eq!(chart.gamma(0, 0, 0), &Poly::x(1));
    }

    #[test]
    fn alias_for_entries() {
        let spec = parse_chart(br#"{"dim":2,"gamma_entries":[],"n_work":4,"h_order":1}"#).unwrap();
        assert!(spec.gamma.is_empty());
    }

    #[test]
    fn odd_dimension_rejected() {
        let err = parse_chart(br#"{"dim":3,"gamma":[]}"#).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn conflicting_entries_rejected() {
        let text = br#"{"dim":2,"gamma":[
            {"indices":[1,1,2],"poly":"x1"},
            {"indices":[1,2,1],"poly":"x2"}]}"#;
        assert!(matches!(parse_chart(text), Err(Error::Validation(_))));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_chart(b"{\"dim\": 2,\n  \"gamma\": [,]}").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 13)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn index_range_checked() {
        let text = br#"{"dim":2,"gamma":[{"indices":[0,1,1],"poly":"1"}]}"#;
        assert!(matches!(parse_chart(text), Err(Error::Validation(_))));
        let text = br#"{"dim":2,"gamma":[{"indices":[3,1,1],"poly":"1"}]}"#;
        assert!(matches!(parse_chart(text), Err(Error::Validation(_))));
    }

    #[test]
    fn bad_polynomial_is_a_parse_error() {
        let text = br#"{"dim":2,"gamma":[{"indices":[1,1,1],"poly":"x1 +"}]}"#;
        assert!(matches!(parse_chart(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(matches!(
            parse_chart(br#"{"dim":2,"omega":[]}"#),
            Err(Error::Parse { .. })
        ));
    }
}
