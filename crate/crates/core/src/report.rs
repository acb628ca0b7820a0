//! Machine-readable check reports.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{validation, Result};

/// One verified statement with its two sides, tolerance and verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// Short identifier of the statement being checked.
    pub anchor: String,
    /// SHA-256 of a textual description of the inputs.
    pub digest: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn digest(inputs: &str) -> String {
    Sha256::digest(inputs.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl CheckRecord {
    /// `residual = |lhs − rhs| / max(1, |rhs|)`, passing when `residual ≤ tol`.
    pub fn compare(name: &str, anchor: &str, inputs: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let residual = (lhs - rhs).abs() / rhs.abs().max(1.0);
        Self::with_residual(name, anchor, inputs, lhs, rhs, residual, tol)
    }

    /// Given residual; passes when it is finite and `≤ tol`.
    pub fn with_residual(name: &str, anchor: &str, inputs: &str, lhs: f64, rhs: f64, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            digest: digest(inputs),
            lhs,
            rhs,
            residual,
            tol,
            pass: residual.is_finite() && residual <= tol,
        }
    }

    /// `lhs ≥ rhs − tol`; the residual is the shortfall.
    pub fn at_least(name: &str, anchor: &str, inputs: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let residual = (rhs - lhs).max(0.0);
        Self::with_residual(name, anchor, inputs, lhs, rhs, residual, tol)
    }

    /// A yes/no statement, recorded as `lhs = 1` for true against `rhs = 1`.
    pub fn flag(name: &str, anchor: &str, inputs: &str, ok: bool) -> Self {
        let lhs = if ok { 1.0 } else { 0.0 };
        Self::with_residual(name, anchor, inputs, lhs, 1.0, 1.0 - lhs, 0.0)
    }

    /// Prefixes the name, used when suites are combined.
    pub fn scoped(mut self, scope: &str) -> Self {
        self.name = format!("{scope}/{}", self.name);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    pub seed: u64,
    pub n: usize,
    pub mode: String,
    pub elapsed_ms: u64,
}

impl ReportDocument {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn require<'a>(
    obj: &'a serde_json::Map<String, Value>,
    key: &str,
    ok: fn(&Value) -> bool,
    what: &str,
) -> Result<&'a Value> {
    let v = obj.get(key).ok_or_else(|| validation(format!("missing field `{key}`")))?;
    if !ok(v) {
        return Err(validation(format!("field `{key}` must be {what}")));
    }
    Ok(v)
}

fn number_or_null(v: &Value) -> bool {
    v.is_number() || v.is_null()
}

/// Checks a JSON value against the report schema.
pub fn validate_report_json(v: &Value) -> Result<()> {
    let obj = v.as_object().ok_or_else(|| validation("report must be an object"))?;
    require(obj, "suite", Value::is_string, "a string")?;
    require(obj, "seed", Value::is_u64, "a nonnegative integer")?;
    require(obj, "n", Value::is_u64, "a nonnegative integer")?;
    let mode = require(obj, "mode", Value::is_string, "a string")?;
    if !matches!(mode.as_str(), Some("rational" | "float")) {
        return Err(validation("field `mode` must be `rational` or `float`"));
    }
    require(obj, "elapsed_ms", Value::is_u64, "a nonnegative integer")?;
    let checks = require(obj, "checks", Value::is_array, "an array")?;
    for (i, c) in checks.as_array().into_iter().flatten().enumerate() {
        let c = c.as_object().ok_or_else(|| validation(format!("check {i} must be an object")))?;
        require(c, "name", Value::is_string, "a string")?;
        require(c, "anchor", Value::is_string, "a string")?;
        for key in ["lhs", "rhs", "residual", "tol"] {
            require(c, key, number_or_null, "a number")?;
        }
        require(c, "pass", Value::is_boolean, "a boolean")?;
    }
    Ok(())
}
