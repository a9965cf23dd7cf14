//! Structured pass/fail records emitted by the theorem audits.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// What a measured quantity is compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    /// |measured - value| <= tolerance * max(1, |value|).
    Value(f64),
    /// lo - tolerance <= measured <= hi + tolerance.
    Interval { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub inputs: Map<String, Value>,
    pub measured: Vec<(String, f64)>,
    pub target: Target,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: String,
}

impl VerificationReport {
    /// Build a report whose pass flag is recomputed from the designated key
    /// quantity (the first entry of `measured`), the target and the
    /// tolerance. Keeping `pass` a pure function of those fields is a
    /// structural invariant of the type.
    pub fn evaluate(
        check_name: impl Into<String>,
        inputs: Map<String, Value>,
        measured: Vec<(String, f64)>,
        target: Target,
        tolerance: f64,
        notes: impl Into<String>,
    ) -> Self {
        let key = measured.first().map(|m| m.1).unwrap_or(f64::NAN);
        let pass = Self::passes(key, &target, tolerance);
        Self {
            check_name: check_name.into(),
            inputs,
            measured,
            target,
            tolerance,
            pass,
            notes: notes.into(),
        }
    }

    /// The pass rule shared by `evaluate` and external re-checks.
    pub fn passes(measured: f64, target: &Target, tolerance: f64) -> bool {
        if !measured.is_finite() {
            return false;
        }
        match *target {
            Target::Value(v) => (measured - v).abs() <= tolerance * v.abs().max(1.0),
            Target::Interval { lo, hi } => {
                measured >= lo - tolerance && measured <= hi + tolerance
            }
        }
    }

    /// Key measured quantity (first entry).
    pub fn key_measurement(&self) -> f64 {
        self.measured.first().map(|m| m.1).unwrap_or(f64::NAN)
    }
}

/// Convenience constructor for the `inputs` map.
pub fn inputs_of(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| ((*k).to_string(), v.clone())).collect()
}
