//! Experiment results and their CSV/JSON serialisation.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;
use crate::stats::{TestReport, Verdict};
use crate::Result;

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Fire probability used, when the experiment has one.
    pub p: Option<f64>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Trials excluded from the rows (degenerate or rejected).
    pub dropped: usize,
    pub summary: Map<String, Value>,
    pub tests: Vec<TestReport>,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig, p: Option<f64>, header: Vec<String>) -> Self {
        ExperimentReport {
            config: config.clone(),
            p,
            header,
            rows: Vec::new(),
            dropped: 0,
            summary: Map::new(),
            tests: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, test: TestReport) {
        self.tests.push(test);
    }

    pub fn test(&self, name: &str) -> Option<&TestReport> {
        self.tests.iter().find(|t| t.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TestReport> {
        self.tests.iter().filter(|t| t.verdict == Verdict::Fail)
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "experiment": self.config.experiment,
            "config": self.config,
            "p": self.p,
            "regime_class": self.config.class(),
            "rows": self.rows.len(),
            "dropped_trials": self.dropped,
            "summary": self.summary,
            "tests": self.tests,
            "all_passed": self.all_passed(),
        })
    }

    /// Writes `<dir>/<experiment>.csv` and `<dir>/<experiment>.json`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.config.experiment));
        let json_path = dir.join(format!("{}.json", self.config.experiment));
        fs::write(&csv_path, self.csv_bytes()?)?;
        let mut text = serde_json::to_string_pretty(&self.to_json())?;
        text.push('\n');
        fs::write(&json_path, text)?;
        Ok((csv_path, json_path))
    }
}
