//! Exhaustive summation over all `2^n` outcome paths.

use rayon::prelude::*;

use super::Model;
use crate::pmf::Pmf;
use crate::Error;

/// Largest `n` accepted by [`Model::brute_force_pmf`].
pub const BRUTE_FORCE_MAX_N: usize = 20;

/// Paths are split into this many fixed slices (or fewer for small `n`);
/// partial sums are combined in slice order so the result never depends on
/// how many worker threads ran.
const SLICES: u64 = 64;

/// Outcomes `y_1..y_n` of one course, `y_j = 1` iff session `j` was
/// understood. Bit `j-1` of `bits` holds `y_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutcomePath {
    bits: u64,
    len: usize,
}

impl OutcomePath {
    /// # Panics
    ///
    /// If `len > 64` or `bits` has a set bit at or above `len`.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        assert!(len <= 64, "paths longer than 64 sessions are not representable");
        assert!(len == 64 || bits >> len == 0, "bits beyond the path length");
        Self { bits, len }
    }

    pub fn from_outcomes(outcomes: &[bool]) -> Self {
        let bits = outcomes.iter().rev().fold(0u64, |acc, &y| (acc << 1) | y as u64);
        Self::from_bits(bits, outcomes.len())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `y_j`, 1-based.
    pub fn outcome(&self, j: usize) -> bool {
        assert!((1..=self.len).contains(&j));
        self.bits >> (j - 1) & 1 == 1
    }

    /// Sessions understood among the first `j`.
    pub fn ones_before(&self, j: usize) -> usize {
        assert!(j <= self.len);
        let mask = if j == 64 { u64::MAX } else { (1u64 << j) - 1 };
        (self.bits & mask).count_ones() as usize
    }

    /// Total number of understood sessions.
    pub fn ones(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// `2·(ones among y_1..y_{j-1}) - (j-1)`; zero for the first session.
    pub fn net_shift(&self, j: usize) -> i64 {
        assert!((1..=self.len).contains(&j));
        2 * self.ones_before(j - 1) as i64 - (j as i64 - 1)
    }

    /// Probability of observing exactly this path.
    pub fn probability(&self, model: &Model) -> f64 {
        assert_eq!(self.len, model.n(), "path length must equal the session count");
        let mut k = 0;
        let mut prob = 1.0;
        for j in 1..=self.len {
            let s = model.session_success_prob(k, j);
            if self.outcome(j) {
                prob *= s;
                k += 1;
            } else {
                prob *= 1.0 - s;
            }
        }
        prob
    }
}

impl Model {
    /// Law of `B_n` by summing the probability of every outcome path.
    /// Refused beyond [`BRUTE_FORCE_MAX_N`] sessions.
    pub fn brute_force_pmf(&self) -> Result<Pmf, Error> {
        let n = self.n();
        if n > BRUTE_FORCE_MAX_N {
            return Err(Error::Budget { n, max: BRUTE_FORCE_MAX_N });
        }
        let total = 1u64 << n;
        let slices = SLICES.min(total);
        let per_slice = total / slices;
        let partials: Vec<Vec<f64>> = (0..slices)
            .into_par_iter()
            .map(|s| {
                let mut acc = vec![0.0; n + 1];
                for bits in s * per_slice..(s + 1) * per_slice {
                    let path = OutcomePath::from_bits(bits, n);
                    acc[path.ones()] += path.probability(self);
                }
                acc
            })
            .collect();
        let mut pmf = vec![0.0; n + 1];
        for partial in &partials {
            for (slot, v) in pmf.iter_mut().zip(partial) {
                *slot += v;
            }
        }
        Ok(Pmf::from_vec(pmf))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{InitialDistribution, ModelParams, ValidationMode};

    fn uniform(n: usize, q: f64, eps: f64) -> Model {
        Model::new(ModelParams::new(n, q, eps), InitialDistribution::Uniform01, ValidationMode::Hypothesis1)
            .unwrap()
    }

    #[test]
    fn path_accounting() {
        let p = OutcomePath::from_outcomes(&[true, false, true, true]);
        assert_eq!(p.ones(), 3);
        assert_eq!(p.net_shift(1), 0);
        assert_eq!(p.net_shift(2), 1);
        assert_eq!(p.net_shift(3), 0);
        assert_eq!(p.net_shift(4), 1);
        for bits in 0..(1u64 << 8) {
            let p = OutcomePath::from_bits(bits, 8);
            for j in 1..=8 {
                assert!((p.net_shift(j).unsigned_abs() as usize) < j);
            }
        }
    }

    #[test]
    fn single_path_probabilities() {
        let m = uniform(3, 0.5, 0.1);
        let p = OutcomePath::from_outcomes(&[true, false, false]);
        assert!((p.probability(&m) - 0.10).abs() < 1e-15);

        let m = uniform(3, 0.3, 0.1);
        let f = |x: f64| x;
        let none = OutcomePath::from_outcomes(&[false, false, false]).probability(&m);
        assert!((none - f(0.7) * f(0.8) * f(0.9)).abs() < 1e-15);
    }

    #[test]
    fn aggregates_three_sessions() {
        let pmf = uniform(3, 0.5, 0.1).brute_force_pmf().unwrap();
        for (got, want) in pmf.probs().iter().zip([0.21, 0.29, 0.29, 0.21]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn refuses_past_budget() {
        let err = uniform(21, 0.5, 0.001).brute_force_pmf().unwrap_err();
        assert!(matches!(err, Error::Budget { n: 21, max: 20 }));
    }

    #[test]
    fn matches_recursion() {
        for n in [1, 2, 5, 9, 14] {
            let m = uniform(n, 0.35, 0.3 / n as f64);
            let diff = m.brute_force_pmf().unwrap().max_abs_diff(&m.exact_pmf());
            assert!(diff < 1e-12, "n={n}: {diff}");
        }
    }
}
