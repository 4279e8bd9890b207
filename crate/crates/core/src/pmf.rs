use serde::Serialize;

/// Probability mass function on the support `{0, 1, ..., n}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Tolerance on the total mass accepted by [`Pmf::checked`].
    pub const SUM_TOLERANCE: f64 = 1e-12;

    /// Wraps probabilities without checking them.
    pub fn from_vec(probs: Vec<f64>) -> Self {
        assert!(!probs.is_empty(), "a pmf needs a non-empty support");
        Self { probs }
    }

    /// Wraps probabilities after checking every entry lies in `[0, 1]` and
    /// the total is within [`Pmf::SUM_TOLERANCE`] of one.
    pub fn checked(probs: Vec<f64>) -> Option<Self> {
        let ok = !probs.is_empty()
            && probs.iter().all(|p| (0.0..=1.0).contains(p))
            && (probs.iter().sum::<f64>() - 1.0).abs() <= Self::SUM_TOLERANCE;
        ok.then_some(Self { probs })
    }

    /// Point mass at `k` on `{0..n}`.
    pub fn point_mass(n: usize, k: usize) -> Self {
        assert!(k <= n);
        let mut probs = vec![0.0; n + 1];
        probs[k] = 1.0;
        Self { probs }
    }

    /// Largest support point.
    pub fn n(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    /// `P[X >= k]` for every `k`.
    pub fn upper_tail(&self) -> Vec<f64> {
        let mut tail = vec![0.0; self.probs.len()];
        let mut acc = 0.0;
        for k in (0..self.probs.len()).rev() {
            acc += self.probs[k];
            tail[k] = acc;
        }
        tail
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Pmf) -> f64 {
        assert_eq!(self.len(), other.len(), "pmf supports differ");
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.probs[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_enforces_invariants() {
        assert!(Pmf::checked(vec![0.5, 0.5]).is_some());
        assert!(Pmf::checked(vec![0.5, 0.6]).is_none());
        assert!(Pmf::checked(vec![1.2, -0.2]).is_none());
        assert!(Pmf::checked(vec![]).is_none());
    }

    #[test]
    fn tail_and_mean() {
        let p = Pmf::from_vec(vec![0.25, 0.5, 0.25]);
        assert_eq!(p.upper_tail(), vec![1.0, 0.75, 0.25]);
        assert_eq!(p.mean(), 1.0);
        assert_eq!(Pmf::point_mass(3, 3).mean(), 3.0);
    }
}
