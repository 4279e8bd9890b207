use std::fmt;

use serde::Serialize;

/// Relative slack allowed on the non-strict shift bound so that a bound
/// computed as `limit / (n - 1)` is not rejected over a rounding ulp.
pub(crate) const BOUNDARY_SLACK: f64 = 1e-12;

/// Course parameters: session count, teaching quality and dependence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub n: usize,
    pub q: f64,
    pub eps: f64,
}

/// Which validity regime to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationMode {
    /// `(n-1)·eps < min(q, 1-q)`.
    Strict,
    /// `(n-1)·eps <= min(q, 1-q)`: every threshold stays inside `[0, 1]`.
    Hypothesis1,
    /// Any shift accepted; thresholds leaving the support are clamped.
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    SessionCount { n: usize },
    Quality { q: f64 },
    Dependence { eps: f64 },
    StrictShiftBound { shift: f64, limit: f64 },
    Hypothesis1ShiftBound { shift: f64, limit: f64 },
    SupportNotCovered { lo: f64, hi: f64, support_lo: f64, support_hi: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::SessionCount { n } => write!(f, "n = {n} must be at least 1"),
            Violation::Quality { q } => write!(f, "q = {q} must lie strictly inside (0, 1)"),
            Violation::Dependence { eps } => {
                write!(f, "eps = {eps} must be finite and non-negative")
            }
            Violation::StrictShiftBound { shift, limit } => {
                write!(f, "(n-1)*eps = {shift} is not < min(q, 1-q) = {limit}")
            }
            Violation::Hypothesis1ShiftBound { shift, limit } => {
                write!(f, "(n-1)*eps = {shift} exceeds min(q, 1-q) = {limit}")
            }
            Violation::SupportNotCovered { lo, hi, support_lo, support_hi } => write!(
                f,
                "threshold range [{lo}, {hi}] leaves the support [{support_lo}, {support_hi}] of F"
            ),
        }
    }
}

/// Outcome of a validation pass. Violations are reported, never thrown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub mode: ValidationMode,
    pub violations: Vec<Violation>,
    /// Set when some threshold argument falls outside `[0, 1]` (or the
    /// table support) and will be clamped. Only reachable in relaxed mode.
    pub clamps_thresholds: bool,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl ModelParams {
    pub fn new(n: usize, q: f64, eps: f64) -> Self {
        Self { n, q, eps }
    }

    /// `(n-1)·eps`, the largest total threshold shift.
    pub fn max_shift(&self) -> f64 {
        self.n.saturating_sub(1) as f64 * self.eps
    }

    /// Range `[1-q-(n-1)eps, 1-q+(n-1)eps]` swept by the threshold argument.
    pub fn threshold_range(&self) -> (f64, f64) {
        let centre = 1.0 - self.q;
        (centre - self.max_shift(), centre + self.max_shift())
    }

    pub fn validate(&self, mode: ValidationMode) -> ValidationReport {
        let mut violations = Vec::new();
        if self.n == 0 {
            violations.push(Violation::SessionCount { n: self.n });
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            violations.push(Violation::Quality { q: self.q });
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            violations.push(Violation::Dependence { eps: self.eps });
        }
        let mut clamps_thresholds = false;
        if violations.is_empty() {
            let shift = self.max_shift();
            let limit = self.q.min(1.0 - self.q);
            match mode {
                ValidationMode::Strict if shift >= limit => {
                    violations.push(Violation::StrictShiftBound { shift, limit })
                }
                ValidationMode::Hypothesis1 if shift > limit * (1.0 + BOUNDARY_SLACK) => {
                    violations.push(Violation::Hypothesis1ShiftBound { shift, limit })
                }
                ValidationMode::Relaxed => clamps_thresholds = shift > limit,
                _ => {}
            }
        }
        ValidationReport { mode, violations, clamps_thresholds }
    }
}
