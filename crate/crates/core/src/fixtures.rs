//! Golden-value corpus: one JSON document per module under `fixtures/`.
//!
//! Each document is written one case per line with keys in sorted order and
//! floats at 17 significant digits, so regenerating it from the same inputs
//! reproduces the file byte for byte.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fmt::to_json;

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Transcribed from a published table; `source` names the table.
    Published,
    /// Follows from an identity or a special case by hand.
    Exact,
    /// Computed by an independent brute-force routine named in `source`.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenCase {
    pub id: String,
    pub inputs: Value,
    pub expected: Value,
    pub origin: Origin,
    pub source: String,
    pub tolerance: f64,
}

impl GoldenCase {
    pub fn new(
        id: impl Into<String>,
        inputs: Value,
        expected: Value,
        origin: Origin,
        source: impl Into<String>,
        tolerance: f64,
    ) -> Self {
        Self { id: id.into(), inputs, expected, origin, source: source.into(), tolerance }
    }

    pub fn input(&self, key: &str) -> f64 {
        self.inputs[key].as_f64().unwrap_or(f64::NAN)
    }

    pub fn expected_f64(&self) -> f64 {
        self.expected.as_f64().unwrap_or(f64::NAN)
    }

    pub fn expected_vec(&self) -> Vec<f64> {
        self.expected.as_array().map(|a| a.iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect()).unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureFile {
    pub module: String,
    pub cases: Vec<GoldenCase>,
}

impl FixtureFile {
    pub fn new(module: impl Into<String>, cases: Vec<GoldenCase>) -> Self {
        Self { module: module.into(), cases }
    }

    pub fn case(&self, id: &str) -> &GoldenCase {
        self.cases.iter().find(|c| c.id == id).unwrap_or_else(|| panic!("fixture {}/{id} is missing", self.module))
    }

    /// Cases whose id starts with `prefix`, in file order.
    pub fn group<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a GoldenCase> + 'a {
        self.cases.iter().filter(move |c| c.id.starts_with(prefix))
    }

    /// Every case needs a non-empty source and a usable tolerance, and ids
    /// must be unique.
    pub fn validate(&self) -> Result<()> {
        let mut ids = std::collections::BTreeSet::new();
        for c in &self.cases {
            if c.source.trim().is_empty() {
                return Err(Error::Domain(format!("fixture {}/{} has no source", self.module, c.id)));
            }
            if !(c.tolerance >= 0.0) {
                return Err(Error::Domain(format!("fixture {}/{} has tolerance {}", self.module, c.id, c.tolerance)));
            }
            if !ids.insert(c.id.as_str()) {
                return Err(Error::Domain(format!("fixture {}/{} is duplicated", self.module, c.id)));
            }
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = format!("{{\"module\":{},\"cases\":[\n", to_json(&self.module));
        for (i, c) in self.cases.iter().enumerate() {
            out.push_str(&to_json(c));
            out.push_str(if i + 1 < self.cases.len() { ",\n" } else { "\n" });
        }
        out.push_str("]}\n");
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), token: e.to_string() })?;
        f.validate()?;
        Ok(f)
    }
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_path(module: &str) -> PathBuf {
    fixture_dir().join(format!("{module}.json"))
}

pub fn load(module: &str) -> Result<FixtureFile> {
    let path = fixture_path(module);
    let text =
        std::fs::read_to_string(&path).map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
    FixtureFile::parse(&text)
}
