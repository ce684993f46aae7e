//! Audit records shared by the model bounds and the functional audits.

use serde::{Deserialize, Serialize};

use crate::model::EstimateConstants;

/// Location of the worst measured violation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: f64,
    pub x: f64,
}

/// Outcome of checking one inequality.
///
/// `max_violation` is the largest positive excess of the left side over the
/// right side (zero when the inequality holds everywhere); `worst_margin`
/// keeps the signed value so passing audits still show how close they came.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub inequality: String,
    pub passed: bool,
    pub max_violation: f64,
    pub tolerance_budget: f64,
    pub worst_margin: f64,
    pub witness: Option<Witness>,
    /// Estimate constants the inequality depends on, if any.
    pub constants_used: Option<EstimateConstants<f64>>,
    /// Informational measurements (ratios, sharper constants, counts).
    #[serde(default)]
    pub info: Vec<(String, f64)>,
}

impl AuditReport {
    pub(crate) fn new(
        inequality: impl Into<String>,
        tolerance_budget: f64,
        constants_used: Option<EstimateConstants<f64>>,
    ) -> Self {
        Self {
            inequality: inequality.into(),
            passed: true,
            max_violation: 0.0,
            tolerance_budget,
            worst_margin: f64::NEG_INFINITY,
            witness: None,
            constants_used,
            info: Vec::new(),
        }
    }

    /// Records `lhs - rhs` at a point. Keeps the first point attaining the
    /// worst signed margin as witness.
    pub(crate) fn observe(&mut self, excess: f64, witness: Option<Witness>) {
        if excess.is_nan() {
            self.max_violation = f64::INFINITY;
            self.worst_margin = f64::INFINITY;
            self.witness = witness;
        } else if excess > self.worst_margin {
            self.worst_margin = excess;
            self.witness = witness;
            self.max_violation = self.max_violation.max(excess);
        }
        self.passed = self.max_violation <= self.tolerance_budget;
    }

    pub(crate) fn with_info(mut self, key: &str, value: f64) -> Self {
        self.info.push((key.to_string(), value));
        self
    }

    pub(crate) fn finish(mut self) -> Self {
        if self.worst_margin == f64::NEG_INFINITY {
            // nothing observed
            self.worst_margin = 0.0;
        }
        self.passed = self.max_violation <= self.tolerance_budget;
        self
    }

    pub fn info_value(&self, key: &str) -> Option<f64> {
        self.info.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}
