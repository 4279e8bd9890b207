//! Exact law of `B_n`, the number of sessions understood out of `n`.
//!
//! After `j-1` sessions of which `k` were understood the threshold argument
//! has moved by `-(2k - (j-1))·eps` from `1 - q`: every understood session
//! lowers it by `eps` and every missed one raises it by `eps`. Session `j` is
//! understood with probability `F̄(1 - q - (2k - (j-1))·eps)`, so the count of
//! understood sessions is itself a Markov chain on `{0..j}` even though the
//! individual outcomes are not.

mod oracle;
mod params;

pub use oracle::{OutcomePath, BRUTE_FORCE_MAX_N};
pub use params::{ModelParams, ValidationMode, ValidationReport, Violation};

use params::BOUNDARY_SLACK;

use crate::dist::InitialDistribution;
use crate::pmf::Pmf;
use crate::Error;

/// Validated parameters paired with an initial distribution.
#[derive(Debug, Clone)]
pub struct Model {
    params: ModelParams,
    dist: InitialDistribution,
    report: ValidationReport,
}

impl Model {
    /// Validates `params` (and, for table distributions, that every threshold
    /// stays inside the table support) in the requested mode.
    pub fn new(
        params: ModelParams,
        dist: InitialDistribution,
        mode: ValidationMode,
    ) -> Result<Self, Error> {
        let report = Self::validate(&params, &dist, mode);
        if !report.passes() {
            return Err(Error::Validation(report));
        }
        Ok(Self { params, dist, report })
    }

    /// Full validation report for `params` under `dist`, without building.
    pub fn validate(
        params: &ModelParams,
        dist: &InitialDistribution,
        mode: ValidationMode,
    ) -> ValidationReport {
        let mut report = params.validate(mode);
        if report.passes() && !dist.is_uniform() {
            let (lo, hi) = params.threshold_range();
            let (support_lo, support_hi) = dist.support();
            let slack = BOUNDARY_SLACK * (support_hi - support_lo);
            if lo < support_lo - slack || hi > support_hi + slack {
                if mode == ValidationMode::Relaxed {
                    report.clamps_thresholds = true;
                } else {
                    report.violations.push(Violation::SupportNotCovered {
                        lo,
                        hi,
                        support_lo,
                        support_hi,
                    });
                }
            }
        }
        report
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dist(&self) -> &InitialDistribution {
        &self.dist
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    /// Threshold argument for session `j` after `k` understood sessions.
    fn threshold(&self, k: usize, j: usize) -> f64 {
        let net_shift = 2 * k as i64 - (j as i64 - 1);
        1.0 - self.params.q - net_shift as f64 * self.params.eps
    }

    /// Probability of understanding session `j` (1-based) given that `k` of
    /// the previous `j-1` sessions were understood.
    ///
    /// # Panics
    ///
    /// If `j` is outside `1..=n` or `k > j - 1`.
    pub fn session_success_prob(&self, k: usize, j: usize) -> f64 {
        assert!((1..=self.params.n).contains(&j), "session {j} outside 1..={}", self.params.n);
        assert!(k < j, "k = {k} understood sessions impossible before session {j}");
        self.dist.sf(self.threshold(k, j))
    }

    /// Runs the forward recursion, handing each row `P[B_j = ·]`, `j = 0..=n`,
    /// to `visit`.
    fn forward(&self, mut visit: impl FnMut(usize, &[f64])) {
        let n = self.params.n;
        let mut row = Vec::with_capacity(n + 1);
        let mut next = Vec::with_capacity(n + 1);
        row.push(1.0);
        visit(0, &row);
        for j in 1..=n {
            next.clear();
            next.resize(j + 1, 0.0);
            for (k, &mass) in row.iter().enumerate() {
                let arg = self.threshold(k, j);
                next[k] += mass * self.dist.cdf(arg);
                next[k + 1] += mass * self.dist.sf(arg);
            }
            std::mem::swap(&mut row, &mut next);
            visit(j, &row);
        }
    }

    /// Exact distribution of `B_n`.
    pub fn exact_pmf(&self) -> Pmf {
        let mut out = Vec::new();
        self.forward(|j, row| {
            if j == self.params.n {
                out = row.to_vec();
            }
        });
        Pmf::from_vec(out)
    }

    /// Exact marginals `p_j = P[session j understood]`, `j = 1..=n`,
    /// obtained by averaging the success probability over `B_{j-1}`.
    pub fn exact_marginals(&self) -> Vec<f64> {
        let n = self.params.n;
        let mut marginals = Vec::with_capacity(n);
        self.forward(|j, row| {
            if j < n {
                let p: f64 = row
                    .iter()
                    .enumerate()
                    .map(|(k, &mass)| mass * self.session_success_prob(k, j + 1))
                    .sum();
                marginals.push(p);
            }
        });
        marginals
    }

    /// Exact `E[B_n]`, the sum of the exact marginals.
    pub fn exact_mean(&self) -> f64 {
        self.exact_marginals().iter().sum()
    }

    /// `(ln P[B_n = 0], ln P[B_n = n])` from the closed boundary products
    /// `∏ F(1-q+j·eps)` and `∏ F̄(1-q-j·eps)`, `j = 0..n-1`.
    pub fn boundary_log_probs(&self) -> (f64, f64) {
        let base = 1.0 - self.params.q;
        let eps = self.params.eps;
        (0..self.params.n).fold((0.0, 0.0), |(none, all), j| {
            (
                none + self.dist.cdf(base + j as f64 * eps).ln(),
                all + self.dist.sf(base - j as f64 * eps).ln(),
            )
        })
    }

    /// One step of the recursion as a bidiagonal transition matrix mapping
    /// `P[B_{step-1} = ·]` to `P[B_step = ·]`.
    ///
    /// # Panics
    ///
    /// If `step` is outside `1..=n`.
    pub fn transition_row(&self, step: usize) -> TransitionRow {
        assert!((1..=self.params.n).contains(&step), "step {step} outside 1..={}", self.params.n);
        let (stay, advance) = (0..step)
            .map(|k| {
                let arg = self.threshold(k, step);
                (self.dist.cdf(arg), self.dist.sf(arg))
            })
            .unzip();
        TransitionRow { step, stay, advance }
    }
}

/// Bidiagonal transition for one session. Row `k_prev` carries `stay[k_prev]`
/// on the diagonal (session missed) and `advance[k_prev]` just right of it
/// (session understood).
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    pub step: usize,
    pub stay: Vec<f64>,
    pub advance: Vec<f64>,
}

impl TransitionRow {
    /// Non-zero entries as `(k_prev, k_next, weight)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.step).flat_map(move |k| [(k, k, self.stay[k]), (k, k + 1, self.advance[k])])
    }

    /// Row vector times matrix.
    ///
    /// # Panics
    ///
    /// If `row.len() != step`.
    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        assert_eq!(row.len(), self.step, "row length must equal the step index");
        let mut out = vec![0.0; self.step + 1];
        for (k_prev, k_next, w) in self.entries() {
            out[k_next] += row[k_prev] * w;
        }
        out
    }
}
