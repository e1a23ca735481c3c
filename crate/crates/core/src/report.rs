//! Protocol reports and their JSON / table renderings.
//!
//! JSON output is deterministic: fields keep declaration order, auxiliary
//! values live in sorted maps, and probabilities are rendered as strings with
//! 12 significant digits. Wall-clock time is kept out of the serialized form.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::catalg::CatLabel;
use crate::circuits::Circuit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "table" => Ok(Format::Table),
            other => Err(format!("unknown format {other:?} (expected json or table)")),
        }
    }
}

/// `x` as a decimal string with 12 significant digits, e.g. `0.125000000000`.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    // values this small are rounding residue of exact zeros
    if x.abs() < 1e-15 {
        return format!("{:.11}", 0.0);
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (11 - exponent).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.99… → 10.0…)
    let digits = s.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
    if digits.trim_start_matches('0').len() > 12 && decimals > 0 {
        let d = decimals - 1;
        return format!("{x:.d$}");
    }
    s
}

fn ser_sig12<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&sig12(*x))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub measured: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl Into<String>, measured: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            expected: expected.into(),
            measured: measured.into(),
            passed,
        }
    }

    /// `|measured - expected| <= tol`.
    pub fn close(name: impl Into<String>, expected: f64, measured: f64, tol: f64) -> Self {
        Check::new(
            name,
            format!("{} ± {tol:e}", sig12(expected)),
            sig12(measured),
            (measured - expected).abs() <= tol,
        )
    }

    pub fn holds(name: impl Into<String>, measured: impl Into<String>, passed: bool) -> Self {
        Check::new(name, "true", measured, passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRecord {
    /// Measurement outcome (the classical message), when the protocol has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<CatLabel>,
    #[serde(serialize_with = "ser_sig12")]
    pub probability: f64,
    /// Number of times the outcome was drawn in sampled mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<CatLabel>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
}

impl OutcomeRecord {
    pub fn new(outcome: Option<CatLabel>, probability: f64, residual: Option<CatLabel>) -> Self {
        OutcomeRecord {
            outcome,
            probability,
            count: None,
            residual,
            details: BTreeMap::new(),
        }
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub scenario: String,
    pub kind: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub mode: String,
    pub outcomes: Vec<OutcomeRecord>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub circuits: Vec<Circuit>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl ProtocolReport {
    pub fn new(kind: &str, mode: impl Into<String>) -> Self {
        ProtocolReport {
            scenario: kind.to_string(),
            kind: kind.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
            mode: mode.into(),
            outcomes: Vec::new(),
            checks: Vec::new(),
            values: BTreeMap::new(),
            circuits: Vec::new(),
            wall_clock: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) {
        self.values.insert(key.to_string(), v.into());
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn emit_report(report: &ProtocolReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Table => table(report),
    }
}

fn label_text(l: &Option<CatLabel>) -> String {
    l.as_ref().map(|l| l.to_string()).unwrap_or_else(|| "-".into())
}

fn table(r: &ProtocolReport) -> String {
    let mut out = String::new();
    let seed = r.seed.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
    let _ = writeln!(out, "scenario {} ({}), mode {}, seed {}", r.scenario, r.kind, r.mode, seed);
    if !r.outcomes.is_empty() {
        let _ = writeln!(out, "\n{:<28} {:>16} {:>8}  residual", "outcome", "probability", "count");
        for o in &r.outcomes {
            let count = o.count.map(|c| c.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<28} {:>16} {:>8}  {}",
                label_text(&o.outcome),
                sig12(o.probability),
                count,
                label_text(&o.residual)
            );
        }
    }
    if !r.values.is_empty() {
        let _ = writeln!(out);
        for (k, v) in &r.values {
            let _ = writeln!(out, "{k}: {v}");
        }
    }
    let _ = writeln!(out, "\n{:<6} {:<44} {:<28} measured", "result", "check", "expected");
    for c in &r.checks {
        let _ = writeln!(
            out,
            "{:<6} {:<44} {:<28} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.expected,
            c.measured
        );
    }
    let passed = r.checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "\n{passed}/{} checks passed", r.checks.len());
    out
}
