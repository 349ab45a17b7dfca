//! Audited outcomes of individual claims.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimMode {
    Assert,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub theta_min: f64,
    pub theta_max: f64,
    pub n: usize,
}

impl GridDescriptor {
    pub fn over(thetas: &[f64]) -> Self {
        let lo = thetas.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = thetas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        GridDescriptor { theta_min: lo, theta_max: hi, n: thetas.len() }
    }
}

/// Max and root-mean-square of absolute residuals; NaN poisons the max.
pub fn residual_norms(residuals: &[f64]) -> (f64, f64) {
    if residuals.is_empty() {
        return (0.0, 0.0);
    }
    let mut max = 0.0f64;
    let mut sq = 0.0;
    for r in residuals {
        let a = r.abs();
        if a.is_nan() {
            max = f64::NAN;
        } else if !max.is_nan() {
            max = max.max(a);
        }
        sq += a * a;
    }
    (max, (sq / residuals.len() as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimVerdict {
    pub claim: String,
    /// The relation being checked, in words.
    pub statement: String,
    pub grid: Option<GridDescriptor>,
    pub residual_max: Option<f64>,
    pub residual_l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
    pub tolerance: Option<f64>,
    pub mode: ClaimMode,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl ClaimVerdict {
    pub fn new(claim: &str, statement: &str, mode: ClaimMode, tolerance: Option<f64>) -> Self {
        ClaimVerdict {
            claim: claim.to_string(),
            statement: statement.to_string(),
            grid: None,
            residual_max: None,
            residual_l2: None,
            order: None,
            tolerance,
            mode,
            verdict: Verdict::ReportOnly,
            reason: None,
            details: serde_json::Value::Null,
            wall_time_ms: None,
        }
    }

    pub fn with_residuals(mut self, grid: Option<GridDescriptor>, residuals: &[f64]) -> Self {
        let (max, l2) = residual_norms(residuals);
        self.grid = grid;
        self.residual_max = Some(max);
        self.residual_l2 = Some(l2);
        self.decide()
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = details;
        self
    }

    pub fn with_order(mut self, order: Option<f64>) -> Self {
        self.order = order;
        self
    }

    /// Fails the claim with a reason, independent of mode.
    pub fn failed(mut self, reason: impl Into<String>) -> Self {
        self.verdict = Verdict::Fail;
        self.reason = Some(reason.into());
        self
    }

    /// Re-applies mode and tolerance to the recorded residual.
    pub fn reassess(mut self, mode: ClaimMode, tolerance: Option<f64>) -> Self {
        self.mode = mode;
        self.tolerance = tolerance;
        if self.verdict == Verdict::Fail && self.residual_max.is_none() {
            return self;
        }
        self.reason = None;
        self.decide()
    }

    /// An extra gate evaluated alongside the residual bound (e.g. an order estimate).
    pub fn require(mut self, ok: bool, why: &str) -> Self {
        if self.mode == ClaimMode::Assert && !ok {
            self.verdict = Verdict::Fail;
            self.reason = Some(why.to_string());
        }
        self
    }

    fn decide(mut self) -> Self {
        self.verdict = match self.mode {
            ClaimMode::Report => Verdict::ReportOnly,
            ClaimMode::Assert => match (self.residual_max, self.tolerance) {
                (Some(r), Some(tol)) if r <= tol => Verdict::Pass,
                _ => Verdict::Fail,
            },
        };
        if self.verdict == Verdict::Fail && self.reason.is_none() {
            self.reason = Some(format!(
                "residual {:?} exceeds tolerance {:?}",
                self.residual_max, self.tolerance
            ));
        }
        if self.verdict != Verdict::Fail {
            self.reason = None;
        }
        self
    }
}
