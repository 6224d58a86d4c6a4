//! Experiments checking compensated-compactness statements on concrete
//! sequences, each producing a deterministic [`ExperimentReport`].

pub mod bilinear;
pub mod config;
pub mod decompose;
pub mod defaults;
pub mod defect;
pub mod divcurl;
pub mod elliptic;
pub mod endpoint;
pub mod gaffney;
pub mod multilinear;
pub mod pair;
pub mod quadratic;
pub mod report;
pub mod tests_basis;
pub mod weak_weak;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::error::{HodgeError, Result};
pub use config::Settings;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// Every asserted check passed but a hypothesis could not be certified.
    TaintedPass,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 2,
            Verdict::TaintedPass => 3,
        }
    }
}

/// One named comparison. `passed` is `None` for values that are only reported.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: Option<bool>,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    /// Asserted check `value ≤ threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: Some(value <= threshold),
            value,
            threshold,
            detail: detail.into(),
        }
    }

    /// Asserted check `value ≥ threshold`.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: Some(value >= threshold),
            value,
            threshold,
            detail: detail.into(),
        }
    }

    pub fn info(name: impl Into<String>, value: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: None,
            value,
            threshold: f64::NAN,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub test_id: usize,
    pub value: f64,
    /// Distance to the extrapolated limit of the same test.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub name: String,
    /// Sorted by `n`, then by test.
    pub rows: Vec<TableRow>,
    /// Log-log decay slope of `|value − predicted limit|` per test; `None` at the round-off floor.
    pub slopes: Vec<Option<f64>>,
}

impl ConvergenceTable {
    pub fn empty(name: impl Into<String>) -> Self {
        ConvergenceTable {
            name: name.into(),
            rows: Vec::new(),
            slopes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomSample {
    pub n: usize,
    pub v: Vec<f64>,
    pub mu_mass: f64,
    pub nu_mass: f64,
    pub bound_constant: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomRecord {
    pub location: Vec<f64>,
    /// Components of degree `ℓ₁ + ℓ₂ − 1` in multi-index order.
    pub v: Vec<f64>,
    pub magnitude: f64,
    pub mu_mass: f64,
    pub nu_mass: f64,
    pub bound_constant: Option<f64>,
    /// `max / min` of the per-`n` bound constants.
    pub bound_spread: Option<f64>,
    pub per_n: Vec<AtomSample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config_echo: BTreeMap<String, String>,
    pub tables: Vec<ConvergenceTable>,
    pub atoms: Vec<AtomRecord>,
    pub verdicts: Vec<Check>,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
    #[serde(flatten)]
    pub extras: serde_json::Map<String, Value>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, settings: &Settings) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            config_echo: settings.entries().clone(),
            tables: Vec::new(),
            atoms: Vec::new(),
            verdicts: Vec::new(),
            verdict: Verdict::Pass,
            warnings: Vec::new(),
            extras: serde_json::Map::new(),
        }
    }

    pub fn extra(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.extras.insert(key.to_string(), v);
    }

    /// Fixes the overall verdict from the checks and warnings.
    pub fn finish(mut self) -> Self {
        self.verdict = if self.verdicts.iter().any(|c| c.passed == Some(false)) {
            Verdict::Fail
        } else if !self.warnings.is_empty() {
            Verdict::TaintedPass
        } else {
            Verdict::Pass
        };
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.verdicts.iter().find(|c| c.name == name)
    }

    pub fn main_table(&self) -> Option<&ConvergenceTable> {
        self.tables.first()
    }
}

pub const EXPERIMENTS: &[&str] = &[
    "decompose",
    "wedge",
    "divcurl",
    "multilinear",
    "endpoint",
    "cycles",
    "quadratic",
    "elliptic",
    "gaffney",
    "immersion",
];

/// Default settings merged with user overrides, rejecting unknown keys.
pub fn settings_for(experiment: &str, overrides: &Settings) -> Result<Settings> {
    let mut s = defaults::defaults(experiment)
        .ok_or_else(|| HodgeError::Config(format!("unknown experiment '{experiment}'")))?;
    s.merge_strict(overrides, defaults::factor_sections(experiment))?;
    Ok(s)
}

pub fn run(experiment: &str, settings: &Settings) -> Result<ExperimentReport> {
    let report = match experiment {
        "decompose" => decompose::run(settings)?,
        "wedge" => bilinear::run_wedge(settings)?,
        "cycles" => bilinear::run_cycles(settings)?,
        "divcurl" => divcurl::run(settings)?,
        "multilinear" => multilinear::run(settings)?,
        "endpoint" => endpoint::run(settings)?,
        "quadratic" => quadratic::run(settings)?,
        "elliptic" => elliptic::run(settings)?,
        "gaffney" => gaffney::run(settings)?,
        "immersion" => crate::immersion::run(settings)?,
        other => return Err(HodgeError::Config(format!("unknown experiment '{other}'"))),
    };
    Ok(report.finish())
}
