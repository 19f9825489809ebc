use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::document::FieldError;

/// One named pass/fail check with the number it was decided on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// `None` when the measured value is not finite.
    pub value: Option<f64>,
    pub limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of the arguments and input files.
    pub inputs_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub summaries: BTreeMap<String, f64>,
    #[serde(default)]
    pub notes: Vec<String>,
    /// Not serialized, so saved reports are reproducible byte for byte.
    #[serde(skip)]
    pub wall_time_s: f64,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            inputs_digest: String::new(),
            seed: None,
            checks: Vec::new(),
            summaries: BTreeMap::new(),
            notes: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    /// Passes when `value < limit`.
    pub fn check_below(&mut self, name: &str, value: f64, limit: f64) -> bool {
        let passed = value < limit;
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            value: finite(value),
            limit: finite(limit),
        });
        passed
    }

    pub fn check(&mut self, name: &str, passed: bool) -> bool {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            value: None,
            limit: None,
        });
        passed
    }

    /// Non-finite values are dropped.
    pub fn summary(&mut self, name: &str, value: f64) {
        if value.is_finite() {
            self.summaries.insert(name.to_string(), value);
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn set_digest(&mut self, args: &[String], inputs: &[Vec<u8>]) {
        let mut h = Sha256::new();
        for a in args {
            h.update(a.as_bytes());
            h.update([0u8]);
        }
        for bytes in inputs {
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(bytes);
        }
        self.inputs_digest = h
            .finalize()
            .iter()
            .fold(String::with_capacity(64), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            });
    }

    pub(crate) fn validate(&self) -> Result<(), FieldError> {
        for (k, v) in &self.summaries {
            if !v.is_finite() {
                return Err(FieldError {
                    field: format!("data.summaries.{k}"),
                    message: "non-finite number".into(),
                });
            }
        }
        Ok(())
    }

    /// Human-readable lines: checks, then summaries, then notes.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = match (c.value, c.limit) {
                (Some(v), Some(l)) => {
                    writeln!(out, "{status} {} = {v:.3e} (limit {l:.1e})", c.name)
                }
                (Some(v), None) => writeln!(out, "{status} {} = {v:.3e}", c.name),
                _ => writeln!(out, "{status} {}", c.name),
            };
        }
        for (k, v) in &self.summaries {
            let _ = writeln!(out, "{k}: {v:.17e}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}
