//! Binomial reference law and diagnostics for how closely the exact law of
//! `B_n` follows it.

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{Model, ModelParams, ValidationMode, ValidationReport};
use crate::dist::InitialDistribution;
use crate::montecarlo::tv_distance;
use crate::pmf::Pmf;

/// Reference mass trimmed from the tails (half on each side) when forming
/// the central window.
pub const CENTRAL_TAIL_MASS: f64 = 1e-4;

/// `Binomial(n, p)` pmf.
///
/// Log-weights relative to the mode are accumulated from the term ratios
/// `(n-k+1)/k · p/(1-p)` and normalised once, so no factorial is ever formed
/// and no intermediate overflows.
///
/// # Panics
///
/// If `p` is outside `[0, 1]`.
pub fn binomial_pmf(n: usize, p: f64) -> Pmf {
    assert!((0.0..=1.0).contains(&p), "binomial probability {p} outside [0, 1]");
    if p == 0.0 {
        return Pmf::point_mass(n, 0);
    }
    if p == 1.0 {
        return Pmf::point_mass(n, n);
    }
    let logit = p.ln() - (-p).ln_1p();
    let mode = (((n + 1) as f64 * p).floor() as usize).min(n);
    let mut log_w = vec![0.0; n + 1];
    for k in mode + 1..=n {
        log_w[k] = log_w[k - 1] + ((n - k + 1) as f64 / k as f64).ln() + logit;
    }
    for k in (0..mode).rev() {
        log_w[k] = log_w[k + 1] - ((n - k) as f64 / (k + 1) as f64).ln() - logit;
    }
    let w: Vec<f64> = log_w.iter().map(|l| l.exp()).collect();
    let z: f64 = w.iter().sum();
    Pmf::from_vec(w.into_iter().map(|x| x / z).collect())
}

/// `(ln p_n(0), ln p_n(n))` for `Binomial(n, p)`.
fn binomial_boundary_logs(n: usize, p: f64) -> (f64, f64) {
    (n as f64 * (-p).ln_1p(), n as f64 * p.ln())
}

/// Dependence schedule `eps(n) = c · n^(-2-eta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsSchedule {
    pub c: f64,
    pub eta: f64,
}

impl EpsSchedule {
    /// # Panics
    ///
    /// If `c <= 0` or `eta < 0`.
    pub fn new(c: f64, eta: f64) -> Self {
        assert!(c > 0.0 && c.is_finite(), "schedule constant c = {c} must be positive");
        assert!(eta >= 0.0 && eta.is_finite(), "schedule exponent eta = {eta} must be >= 0");
        Self { c, eta }
    }

    /// `eps = 1/n²`.
    pub fn inverse_square() -> Self {
        Self::new(1.0, 0.0)
    }

    pub fn value(&self, n: usize) -> f64 {
        assert!(n >= 1);
        self.c / (n as f64).powf(2.0 + self.eta)
    }
}

/// Per-`k` ratios `exact[k] / reference[k]` with summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioProfile {
    pub ratios: Vec<f64>,
    pub log_ratios: Vec<f64>,
    /// Indices where the reference is zero but the exact mass is not.
    pub infinite: Vec<usize>,
}

/// Elementwise `exact / reference`. A zero reference against a zero exact
/// mass counts as ratio 1; against a positive mass it is an infinite ratio
/// and is listed in [`RatioProfile::infinite`].
pub fn ratio_profile(exact: &Pmf, reference: &Pmf) -> RatioProfile {
    assert_eq!(exact.len(), reference.len(), "pmf supports differ");
    let mut infinite = Vec::new();
    let ratios: Vec<f64> = exact
        .probs()
        .iter()
        .zip(reference.probs())
        .enumerate()
        .map(|(k, (&e, &r))| {
            if r > 0.0 {
                e / r
            } else if e == 0.0 {
                1.0
            } else {
                infinite.push(k);
                f64::INFINITY
            }
        })
        .collect();
    let log_ratios = ratios.iter().map(|r| r.ln()).collect();
    RatioProfile { ratios, log_ratios, infinite }
}

impl RatioProfile {
    /// Replaces the `k = 0` and `k = n` entries with values from exact log
    /// masses, which stay accurate where the masses themselves underflow.
    pub fn with_boundary_logs(mut self, exact: (f64, f64), reference: (f64, f64)) -> Self {
        let n = self.ratios.len() - 1;
        for (k, e, r) in [(0, exact.0, reference.0), (n, exact.1, reference.1)] {
            if e.is_finite() && r.is_finite() {
                self.log_ratios[k] = e - r;
                self.ratios[k] = (e - r).exp();
                self.infinite.retain(|&i| i != k);
            }
        }
        self
    }

    pub fn min_ratio(&self) -> f64 {
        self.min_ratio_in(0, self.ratios.len() - 1)
    }

    pub fn max_abs_log_ratio(&self) -> f64 {
        self.max_abs_log_ratio_in(0, self.ratios.len() - 1)
    }

    /// Minimum ratio over `lo..=hi`.
    pub fn min_ratio_in(&self, lo: usize, hi: usize) -> f64 {
        self.ratios[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|ln ratio|` over `lo..=hi`.
    pub fn max_abs_log_ratio_in(&self, lo: usize, hi: usize) -> f64 {
        self.log_ratios[lo..=hi].iter().map(|l| l.abs()).fold(0.0, f64::max)
    }
}

/// Smallest index range `[lo, hi]` left after trimming at most
/// `tail_mass / 2` of `reference` from each end.
pub fn central_window(reference: &Pmf, tail_mass: f64) -> (usize, usize) {
    let side = tail_mass / 2.0;
    let probs = reference.probs();
    let (mut lo, mut acc) = (0, 0.0);
    while lo + 1 < probs.len() && acc + probs[lo] <= side {
        acc += probs[lo];
        lo += 1;
    }
    let (mut hi, mut acc) = (probs.len() - 1, 0.0);
    while hi > lo && acc + probs[hi] <= side {
        acc += probs[hi];
        hi -= 1;
    }
    (lo, hi)
}

/// Exact-versus-binomial comparison of a validated model. The reference is
/// `Binomial(n, F̄(1-q))`.
pub fn compare_to_binomial(model: &Model) -> (Pmf, Pmf, RatioProfile) {
    let ModelParams { n, q, .. } = *model.params();
    let exact = model.exact_pmf();
    let p = model.dist().sf(1.0 - q);
    let reference = binomial_pmf(n, p);
    let profile = ratio_profile(&exact, &reference)
        .with_boundary_logs(model.boundary_log_probs(), binomial_boundary_logs(n, p));
    (exact, reference, profile)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub q: f64,
    pub eps: f64,
    /// Minimum ratio over every `k` in `0..=n`.
    pub min_ratio: Option<f64>,
    pub max_abs_log_ratio: Option<f64>,
    pub tv: Option<f64>,
    /// Central window of the reference holding all but [`CENTRAL_TAIL_MASS`].
    pub window_lo: Option<usize>,
    pub window_hi: Option<usize>,
    pub window_min_ratio: Option<f64>,
    pub window_max_abs_log_ratio: Option<f64>,
    /// Present when the cell failed validation; the diagnostics are then empty.
    pub invalid: Option<ValidationReport>,
}

impl ConvergenceRow {
    pub fn is_valid(&self) -> bool {
        self.invalid.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub schedule: EpsSchedule,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn row(&self, q: f64, n: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.q == q && r.n == n)
    }
}

fn convergence_cell(q: f64, n: usize, schedule: EpsSchedule, dist: &InitialDistribution) -> ConvergenceRow {
    let eps = schedule.value(n);
    let mut row = ConvergenceRow {
        n,
        q,
        eps,
        min_ratio: None,
        max_abs_log_ratio: None,
        tv: None,
        window_lo: None,
        window_hi: None,
        window_min_ratio: None,
        window_max_abs_log_ratio: None,
        invalid: None,
    };
    let model = match Model::new(ModelParams::new(n, q, eps), dist.clone(), ValidationMode::Hypothesis1) {
        Ok(m) => m,
        Err(crate::Error::Validation(report)) => {
            row.invalid = Some(report);
            return row;
        }
        Err(e) => unreachable!("model construction only fails validation: {e}"),
    };
    let (exact, reference, profile) = compare_to_binomial(&model);
    let (lo, hi) = central_window(&reference, CENTRAL_TAIL_MASS);
    row.min_ratio = Some(profile.min_ratio());
    row.max_abs_log_ratio = Some(profile.max_abs_log_ratio());
    row.tv = Some(tv_distance(&exact, &reference));
    row.window_lo = Some(lo);
    row.window_hi = Some(hi);
    row.window_min_ratio = Some(profile.min_ratio_in(lo, hi));
    row.window_max_abs_log_ratio = Some(profile.max_abs_log_ratio_in(lo, hi));
    row
}

/// One row per `(q, n)` cell, sorted by `q` then `n`. Cells with
/// `(n-1)·eps > min(q, 1-q)` are flagged and the study continues.
pub fn convergence_study(
    q_list: &[f64],
    n_list: &[usize],
    schedule: EpsSchedule,
    dist: &InitialDistribution,
) -> ConvergenceReport {
    let mut cells: Vec<(f64, usize)> =
        q_list.iter().flat_map(|&q| n_list.iter().map(move |&n| (q, n))).collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let rows = cells
        .par_iter()
        .map(|&(q, n)| convergence_cell(q, n, schedule, dist))
        .collect();
    ConvergenceReport { schedule, rows }
}
