//! CSV tables, JSON summaries and the reproducibility block.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const REPORT_FORMAT: &str = "gpred-report-1";

#[derive(Debug, Clone, Serialize)]
pub struct Reproducibility {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub format: String,
}

impl Reproducibility {
    pub fn new(source: &str, seed: u64) -> Self {
        Self {
            config_hash: hex::encode(Sha256::digest(source.as_bytes())),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            format: REPORT_FORMAT.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Assertion {
    /// `value <= threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value <= threshold }
    }

    /// `value >= threshold`.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value >= threshold }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: ok as u8 as f64, threshold: 1.0, pass: ok }
    }
}

/// A CSV table whose header names carry units in brackets.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Interface(format!("csv: {e}"))
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub kind: String,
    pub reproducibility: Reproducibility,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    pub results: serde_json::Value,
    pub artifacts: Vec<String>,
}

impl Summary {
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// Where a run writes its files.
#[derive(Debug, Clone)]
pub struct OutputDir {
    pub path: PathBuf,
    pub artifacts: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path, name: &str) -> Result<Self> {
        if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
            return Err(Error::config(format!("scenario name `{name}` is not a plain directory name")));
        }
        let path = root.join(name);
        std::fs::create_dir_all(&path)?;
        Ok(Self { path, artifacts: Vec::new() })
    }

    pub fn file(&mut self, name: &str) -> PathBuf {
        self.artifacts.push(name.to_string());
        self.path.join(name)
    }
}
