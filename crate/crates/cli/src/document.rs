//! The JSON tuple format read and written by every command.

use projspec::{Complex64, ComplexMatrix, OperatorTuple};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `{"N": 2, "n": 2, "matrices": [[[[re, im], …], …], …]}` with optional
/// `labels` and `seed`. Matrices are listed row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleDocument {
    #[serde(rename = "N")]
    pub dim: usize,
    pub n: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TupleDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed tuple document: {e}")))
    }

    /// Indented JSON with one matrix row per line.
    pub fn to_json(&self) -> String {
        let mut s = format!("{{\n  \"N\": {},\n  \"n\": {},\n  \"matrices\": [\n", self.dim, self.n);
        for (k, m) in self.matrices.iter().enumerate() {
            s.push_str("    [\n");
            for (i, row) in m.iter().enumerate() {
                s.push_str("      ");
                s.push_str(&compact(row));
                s.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            s.push_str(if k + 1 < self.matrices.len() { "    ],\n" } else { "    ]\n" });
        }
        s.push_str("  ]");
        if let Some(labels) = &self.labels {
            s.push_str(&format!(",\n  \"labels\": {}", compact(labels)));
        }
        if let Some(seed) = self.seed {
            s.push_str(&format!(",\n  \"seed\": {seed}"));
        }
        s.push_str("\n}\n");
        s
    }

    pub fn from_tuple(tuple: &OperatorTuple, labels: Option<Vec<String>>, seed: Option<u64>) -> Self {
        let matrices = tuple
            .matrices()
            .iter()
            .map(|m| {
                m.rows()
                    .into_iter()
                    .map(|row| row.into_iter().map(|x| [x.re, x.im]).collect())
                    .collect()
            })
            .collect();
        Self {
            dim: tuple.dim(),
            n: tuple.arity(),
            matrices,
            labels,
            seed,
        }
    }

    /// Checks the declared sizes against the data and builds the tuple.
    pub fn to_tuple(&self) -> Result<OperatorTuple, CliError> {
        let bad = |msg: String| Err(CliError::Input(msg));
        if self.dim == 0 || self.n == 0 {
            return bad("\"N\" and \"n\" must be positive".into());
        }
        if self.matrices.len() != self.n {
            return bad(format!("\"n\" is {} but {} matrices are given", self.n, self.matrices.len()));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.n {
                return bad(format!("{} labels for {} matrices", labels.len(), self.n));
            }
        }
        let mut out = Vec::with_capacity(self.n);
        for (k, m) in self.matrices.iter().enumerate() {
            if m.len() != self.dim || m.iter().any(|row| row.len() != self.dim) {
                return bad(format!("matrix {k} is not {0}×{0}", self.dim));
            }
            if m.iter().flatten().flatten().any(|x| !x.is_finite()) {
                return bad(format!("matrix {k} has non-finite entries"));
            }
            let rows = m
                .iter()
                .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                .collect();
            out.push(ComplexMatrix::from_rows(rows)?);
        }
        Ok(OperatorTuple::new(out)?)
    }
}

fn compact<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"N": 2, "n": 1, "matrices": [[[[1, 0], [0, 2]], [[0, -1], [3, 0]]]], "labels": ["A"]}"#;
        let doc = TupleDocument::parse(text).unwrap();
        let t = doc.to_tuple().unwrap();
        assert_eq!(t.get(0)[(0, 1)], Complex64::new(0.0, 2.0));
        assert_eq!(TupleDocument::from_tuple(&t, doc.labels.clone(), None), doc);
        assert_eq!(TupleDocument::parse(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn size_errors() {
        for text in [
            r#"{"N": 2, "n": 2, "matrices": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}"#,
            r#"{"N": 2, "n": 1, "matrices": [[[[1, 0]], [[0, 0], [1, 0]]]]}"#,
            r#"{"N": 1, "n": 1, "matrices": [[[[0, 0]]]]}"#,
            r#"{"N": 1, "n": 1, "matrices": [[[[1, 0]]]], "labels": ["A", "B"]}"#,
        ] {
            let doc = TupleDocument::parse(text).unwrap();
            assert!(matches!(doc.to_tuple(), Err(CliError::Input(_))), "{text}");
        }
        assert!(TupleDocument::parse(r#"{"N": 1}"#).is_err());
    }
}
