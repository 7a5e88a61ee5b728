//! Golden files: one JSON record per line,
//! `{"id": ..., "field": ..., "expected": ..., "abs_tol": ..., "rel_tol": ...}`.
//! A field passes when `|value - expected| <= abs_tol + rel_tol |expected|`.
//! Blank lines and lines starting with `#` are skipped.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, GoldenOutcome};
use crate::error::{Error, Result};
use crate::ids::CatalogId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenEntry {
    pub id: String,
    pub field: String,
    pub expected: f64,
    #[serde(default)]
    pub abs_tol: f64,
    #[serde(default)]
    pub rel_tol: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GoldenSet {
    pub entries: Vec<GoldenEntry>,
}

fn canonical(id: &str) -> Result<String> {
    Ok(CatalogId::parse(id)?.to_string())
}

impl GoldenSet {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let mut e: GoldenEntry =
                serde_json::from_str(t).map_err(|e| Error::Parse(format!("golden line {}: {e}", i + 1)))?;
            if e.abs_tol < 0.0 || e.rel_tol < 0.0 || (e.abs_tol == 0.0 && e.rel_tol == 0.0) {
                return Err(Error::Validation(format!("golden line {}: tolerances must be non-negative and not both zero", i + 1)));
            }
            e.id = canonical(&e.id)?;
            entries.push(e);
        }
        Ok(GoldenSet { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        GoldenSet::parse(&std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?)
    }

    /// Experiment ids in file order, without repeats.
    pub fn ids(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.entries.iter().filter(|e| seen.insert(e.id.clone())).map(|e| e.id.clone()).collect()
    }

    /// Compares every entry for the report's experiment and records the outcomes.
    pub fn apply(&self, report: &mut ExperimentReport) {
        for e in self.entries.iter().filter(|e| e.id == report.id) {
            let value = report.value(&e.field);
            let passed =
                value.is_some_and(|v| (v - e.expected).abs() <= e.abs_tol + e.rel_tol * e.expected.abs());
            report.golden.push(GoldenOutcome {
                field: e.field.clone(),
                value,
                expected: e.expected,
                abs_tol: e.abs_tol,
                rel_tol: e.rel_tol,
                passed,
            });
        }
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|e| serde_json::to_string(e).expect("entries serialize") + "\n").collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::report::ValueField;

    #[test]
    fn per_field_tolerances() {
        let g = GoldenSet::parse(
            "# comment\n{\"id\":\"wcs?metric=round-s3&k=2\",\"field\":\"integral\",\"expected\":0.0,\"abs_tol\":1e-6}\n\
             {\"id\":\"wcs?k=2&metric=round-s3\",\"field\":\"evaluations\",\"expected\":100,\"rel_tol\":0.5}\n",
        )
        .unwrap();
        assert_eq!(g.ids().len(), 1);
        let mut r = ExperimentReport::from_machine(
            "{\"record\":\"header\",\"id\":\"wcs?k=2&metric=round-s3\",\"experiment\":\"wcs\",\"seed\":0,\"engine\":\"x\"}",
        )
        .unwrap();
        r.values.push(ValueField { name: "integral".into(), value: 5e-7, std_error: None });
        r.values.push(ValueField { name: "evaluations".into(), value: 140.0, std_error: None });
        g.apply(&mut r);
        assert!(r.golden.iter().all(|o| o.passed));
        r.values[0].value = 2e-6;
        r.golden.clear();
        g.apply(&mut r);
        assert!(!r.passed());
    }

    #[test]
    fn rejects_zero_tolerance() {
        assert!(GoldenSet::parse("{\"id\":\"chern\",\"field\":\"x\",\"expected\":1}").is_err());
    }
}
