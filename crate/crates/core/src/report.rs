//! Machine-readable outcome of one identity check.

use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
    pub notes: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            tol: 0.0,
            pass: false,
            notes: String::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// Passes when |lhs − rhs| ≤ tol·|rhs|.
    pub fn relative(self, lhs: f64, rhs: f64, tol: f64) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = abs_err / rhs.abs();
        let pass = rel_err <= tol;
        Self { lhs, rhs, abs_err, rel_err, tol, pass, ..self }
    }

    /// Passes when |lhs − rhs| ≤ tol.
    pub fn absolute(self, lhs: f64, rhs: f64, tol: f64) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = if rhs != 0.0 { abs_err / rhs.abs() } else { f64::NAN };
        Self { lhs, rhs, abs_err, rel_err, tol, pass: abs_err <= tol, ..self }
    }

    /// Passes when lhs ≥ rhs − tol·|rhs| (an inequality lhs ≥ rhs).
    pub fn at_least(self, lhs: f64, rhs: f64, tol: f64) -> Self {
        let abs_err = lhs - rhs;
        let rel_err = abs_err / rhs.abs();
        Self { lhs, rhs, abs_err, rel_err, tol, pass: lhs >= rhs - tol * rhs.abs(), ..self }
    }

    /// Passes when lhs ≤ rhs + tol·|rhs| (an inequality lhs ≤ rhs).
    pub fn at_most(self, lhs: f64, rhs: f64, tol: f64) -> Self {
        let abs_err = lhs - rhs;
        let rel_err = abs_err / rhs.abs();
        Self { lhs, rhs, abs_err, rel_err, tol, pass: lhs <= rhs + tol * rhs.abs(), ..self }
    }

    /// Overrides the verdict (for checks whose criterion is not a single comparison).
    pub fn verdict(mut self, pass: bool) -> Self {
        self.pass = pass && self.lhs.is_finite() && self.rhs.is_finite();
        self
    }

    pub fn note(mut self, text: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text.as_ref());
        self
    }

    /// A failed report carrying an error message.
    pub fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self::new(name).note(format!("error: {err}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
