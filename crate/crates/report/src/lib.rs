//! Structured pass/fail records for inequality and identity checks.
//!
//! Every checker in the workspace reports through [`VerificationReport`]:
//! a subject line plus an ordered list of [`Check`] entries, each naming
//! the rule it tested, the observed value, and the bound it was held to.
//! Serialization order is the insertion order, so reports built from the
//! same inputs are byte-identical.

use serde::{Deserialize, Serialize};

/// Direction of a single comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckKind {
    /// observed >= bound
    AtLeast,
    /// observed <= bound
    AtMost,
    /// |observed| <= bound (observed is a signed residual)
    WithinAbs,
}

/// One checked inequality or identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub rule: String,
    pub kind: CheckKind,
    pub observed: f64,
    pub bound: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn at_least(rule: impl Into<String>, observed: f64, bound: f64) -> Self {
        Check {
            rule: rule.into(),
            kind: CheckKind::AtLeast,
            observed,
            bound,
            passed: observed >= bound,
            note: None,
        }
    }

    pub fn at_most(rule: impl Into<String>, observed: f64, bound: f64) -> Self {
        Check {
            rule: rule.into(),
            kind: CheckKind::AtMost,
            observed,
            bound,
            passed: observed <= bound,
            note: None,
        }
    }

    /// `observed` is a signed residual held to `|observed| <= tolerance`.
    pub fn within_abs(rule: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        Check {
            rule: rule.into(),
            kind: CheckKind::WithinAbs,
            observed,
            bound: tolerance,
            passed: observed.abs() <= tolerance,
            note: None,
        }
    }

    /// Boolean condition folded into the same record shape.
    pub fn flag(rule: impl Into<String>, ok: bool) -> Self {
        Check {
            rule: rule.into(),
            kind: CheckKind::AtLeast,
            observed: if ok { 1.0 } else { 0.0 },
            bound: 1.0,
            passed: ok,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Margin by which the check passed; negative when it failed.
    pub fn slack(&self) -> f64 {
        match self.kind {
            CheckKind::AtLeast => self.observed - self.bound,
            CheckKind::AtMost => self.bound - self.observed,
            CheckKind::WithinAbs => self.bound - self.observed.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        VerificationReport {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// First check whose rule matches exactly.
    pub fn find(&self, rule: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.rule == rule)
    }

    pub fn slack(&self, rule: &str) -> Option<f64> {
        self.find(rule).map(Check::slack)
    }
}
