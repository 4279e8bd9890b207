//! Marginals through the recursively mixed distributions `F_j`.
//!
//! `F_1 = F` and
//! `F̄_j(x) = F̄_{j-1}(x - eps)·p_{j-1} + F̄_{j-1}(x + eps)·(1 - p_{j-1})`,
//! with `p_j = F̄_j(1 - q)`. The lattice keeps `F̄_j` at the points
//! `1 - q + m·eps` needed to reach `p_n`: level `j` holds `|m| <= n - j`.
//!
//! For a uniform `F` these marginals coincide with the exact ones. For any
//! other `F` they weight the previous level by the unconditional `p_{j-1}`
//! instead of the path-conditional probability and generally differ from
//! [`Model::exact_marginals`].

use crate::chain::{Model, ModelParams, ValidationMode};
use crate::Error;

#[derive(Debug, Clone)]
pub struct MixtureLattice {
    params: ModelParams,
    /// `levels[j-1][m + (n - j)] = F̄_j(1 - q + m·eps)`.
    levels: Vec<Vec<f64>>,
}

impl MixtureLattice {
    /// Runs the `O(n²)` recursion. Requires `(n-1)·eps <= min(q, 1-q)` and,
    /// for a table distribution, the threshold range inside its support.
    pub fn build(model: &Model) -> Result<Self, Error> {
        let params = *model.params();
        let report = Model::validate(&params, model.dist(), ValidationMode::Hypothesis1);
        if !report.passes() {
            return Err(Error::Validation(report));
        }
        let n = params.n;
        let base = 1.0 - params.q;
        let half = n as i64 - 1;
        let first: Vec<f64> = (-half..=half)
            .map(|m| model.dist().sf(base + m as f64 * params.eps))
            .collect();
        let mut levels = Vec::with_capacity(n);
        levels.push(first);
        for j in 2..=n {
            let prev = &levels[j - 2];
            let p_prev = prev[prev.len() / 2];
            // prev is two entries wider; entry m reads prev at m-1 and m+1
            let next: Vec<f64> = (0..prev.len() - 2)
                .map(|i| prev[i] * p_prev + prev[i + 2] * (1.0 - p_prev))
                .collect();
            levels.push(next);
        }
        Ok(Self { params, levels })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `F̄_j(1 - q + m·eps)`.
    ///
    /// # Panics
    ///
    /// If `j` is outside `1..=n` or `|m| > n - j`.
    pub fn sf(&self, j: usize, m: i64) -> f64 {
        let n = self.params.n;
        assert!((1..=n).contains(&j), "level {j} outside 1..={n}");
        let half = (n - j) as i64;
        assert!(m.abs() <= half, "offset {m} not stored at level {j} (|m| <= {half})");
        self.levels[j - 1][(m + half) as usize]
    }

    /// `p_m` from the recursion.
    ///
    /// # Panics
    ///
    /// If `m` is outside `1..=n`.
    pub fn marginal(&self, m: usize) -> f64 {
        self.sf(m, 0)
    }

    pub fn marginals(&self) -> Vec<f64> {
        (1..=self.params.n).map(|m| self.marginal(m)).collect()
    }

    /// `F̄_j(1-q-eps) - F̄_j(1-q+eps)`.
    pub fn bracket(&self, j: usize) -> f64 {
        self.sf(j, -1) - self.sf(j, 1)
    }

    /// `p_m` from the telescoped explicit formula
    /// `F̄_1(1-q)·∏_{j<m} d_j + Σ_{i<m} F̄_i(1-q+eps)·∏_{i<j<m} d_j`
    /// with `d_j` the [`bracket`](Self::bracket). Needs the strict regime
    /// `(n-1)·eps < min(q, 1-q)`.
    pub fn theorem1_marginal(&self, m: usize) -> Result<f64, Error> {
        let report = self.params.validate(ValidationMode::Strict);
        if !report.passes() {
            return Err(Error::Validation(report));
        }
        assert!((1..=self.params.n).contains(&m), "marginal {m} outside 1..={}", self.params.n);
        let mut sum = 0.0;
        let mut tail_product = 1.0;
        for i in (1..m).rev() {
            sum += self.sf(i, 1) * tail_product;
            tail_product *= self.bracket(i);
        }
        Ok(self.sf(1, 0) * tail_product + sum)
    }
}

fn require_uniform(model: &Model, what: &'static str) -> Result<(), Error> {
    if !model.dist().is_uniform() {
        return Err(Error::NonUniform(what));
    }
    let report = model.params().validate(ValidationMode::Hypothesis1);
    if !report.passes() {
        return Err(Error::Validation(report));
    }
    Ok(())
}

/// Closed form `F̄_i(1 - q - m·eps) = (1+2eps)^{i-1}(q - 1/2) + 1/2 + m·eps`
/// for a uniform `F` with `(n-1)·eps <= min(q, 1-q)`.
pub fn uniform_sf_closed(model: &Model, i: usize, m: i64) -> Result<f64, Error> {
    require_uniform(model, "the closed-form F_j")?;
    let ModelParams { n, q, eps } = *model.params();
    assert!((1..=n).contains(&i), "level {i} outside 1..={n}");
    Ok((1.0 + 2.0 * eps).powi(i as i32 - 1) * (q - 0.5) + 0.5 + m as f64 * eps)
}

/// Closed form `p_m = 1/2 + (1+2eps)^{m-1}(q - 1/2)` for a uniform `F`
/// with `(n-1)·eps <= min(q, 1-q)`.
pub fn uniform_marginal_closed(model: &Model, m: usize) -> Result<f64, Error> {
    require_uniform(model, "the closed-form marginal")?;
    let ModelParams { n, q, eps } = *model.params();
    assert!((1..=n).contains(&m), "marginal {m} outside 1..={n}");
    Ok(0.5 + (1.0 + 2.0 * eps).powi(m as i32 - 1) * (q - 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{CdfTable, InitialDistribution};

    fn model(n: usize, q: f64, eps: f64) -> Model {
        Model::new(ModelParams::new(n, q, eps), InitialDistribution::Uniform01, ValidationMode::Hypothesis1)
            .unwrap()
    }

    fn skewed() -> InitialDistribution {
        InitialDistribution::Table(
            CdfTable::new(vec![(0.0, 0.0), (0.3, 0.1), (0.6, 0.7), (1.0, 1.0)]).unwrap(),
        )
    }

    #[test]
    fn one_step_values() {
        let lat = MixtureLattice::build(&model(5, 0.3, 0.05)).unwrap();
        assert!((lat.sf(2, -1) - 0.33).abs() < 1e-15);
        let lat = MixtureLattice::build(&model(3, 0.3, 0.1)).unwrap();
        assert_eq!(lat.marginal(1), InitialDistribution::Uniform01.sf(0.7));
        assert!((lat.marginal(2) - 0.26).abs() < 1e-15);
        assert!((lat.marginal(3) - 0.212).abs() < 1e-15);
    }

    #[test]
    fn first_level_is_the_initial_survival() {
        let m = Model::new(ModelParams::new(8, 0.45, 0.03), skewed(), ValidationMode::Hypothesis1).unwrap();
        let lat = MixtureLattice::build(&m).unwrap();
        for off in -7..=7 {
            assert_eq!(lat.sf(1, off), skewed().sf(0.55 + off as f64 * 0.03));
        }
    }

    #[test]
    fn zero_dependence_collapses() {
        let m = Model::new(ModelParams::new(6, 0.45, 0.0), skewed(), ValidationMode::Strict).unwrap();
        let lat = MixtureLattice::build(&m).unwrap();
        let p = skewed().sf(0.55);
        for j in 1..=6 {
            assert_eq!(lat.marginal(j), p);
            assert_eq!(lat.theorem1_marginal(j).unwrap(), p);
        }
    }

    #[test]
    fn theorem1_examples() {
        let lat = MixtureLattice::build(&model(3, 0.2, 0.01)).unwrap();
        assert!((lat.theorem1_marginal(1).unwrap() - 0.2).abs() < 1e-15);
        assert!((lat.theorem1_marginal(3).unwrap() - 0.18788).abs() < 1e-15);
        for j in 1..=2 {
            assert!((lat.bracket(j) - 0.02).abs() < 1e-15);
        }
    }

    #[test]
    fn theorem1_needs_strict_regime() {
        // boundary: 4 * 0.05 = 0.2
        let lat = MixtureLattice::build(&model(5, 0.2, 0.05)).unwrap();
        assert!(matches!(lat.theorem1_marginal(3), Err(Error::Validation(_))));
        assert!((lat.marginal(3) - (0.5 + 1.1f64.powi(2) * -0.3)).abs() < 1e-15);
    }

    #[test]
    fn build_rejects_outside_hypothesis1() {
        let m = Model::new(ModelParams::new(10, 0.3, 0.05), InitialDistribution::Uniform01, ValidationMode::Relaxed)
            .unwrap();
        assert!(matches!(MixtureLattice::build(&m), Err(Error::Validation(_))));
    }

    #[test]
    fn closed_forms() {
        let m = model(3, 0.2, 0.01);
        assert_eq!(uniform_marginal_closed(&m, 1).unwrap(), 0.2);
        assert!((uniform_marginal_closed(&m, 2).unwrap() - 0.194).abs() < 1e-15);
        assert!((uniform_marginal_closed(&m, 3).unwrap() - 0.18788).abs() < 1e-15);
        assert!((uniform_sf_closed(&m, 1, 2).unwrap() - 0.22).abs() < 1e-15);
        let m = model(6, 0.5, 0.03);
        for i in 1..=6 {
            assert_eq!(uniform_marginal_closed(&m, i).unwrap(), 0.5);
            assert!((uniform_sf_closed(&m, i, -2).unwrap() - 0.44).abs() < 1e-15);
        }
        assert!((uniform_sf_closed(&model(5, 0.3, 0.05), 2, 1).unwrap() - 0.33).abs() < 1e-15);
        let t = Model::new(ModelParams::new(3, 0.2, 0.01), skewed(), ValidationMode::Strict).unwrap();
        assert!(matches!(uniform_marginal_closed(&t, 2), Err(Error::NonUniform(_))));
        assert!(matches!(uniform_sf_closed(&t, 2, 0), Err(Error::NonUniform(_))));
    }

    #[test]
    fn lattice_matches_closed_form_everywhere() {
        for &(n, q, eps) in &[(12, 0.3, 0.02), (30, 0.7, 0.009), (50, 0.15, 0.003)] {
            let m = model(n, q, eps);
            let lat = MixtureLattice::build(&m).unwrap();
            for i in 1..=n {
                let half = (n - i) as i64;
                for off in -half..=half {
                    let closed = uniform_sf_closed(&m, i, off).unwrap();
                    assert!((lat.sf(i, -off) - closed).abs() < 1e-12, "n={n} i={i} m={off}");
                }
            }
        }
    }

    #[test]
    fn uniform_drift_bound() {
        let lat = MixtureLattice::build(&model(40, 0.25, 0.006)).unwrap();
        for m in 1..40 {
            let drift = (lat.marginal(m + 1) - lat.marginal(m)).abs();
            assert!(drift <= 0.006 * (1.0 + 2.0 * 0.006f64).powi(m as i32 - 1) + 1e-15);
        }
    }

    #[test]
    fn table_mixture_differs_from_exact_marginals() {
        let m = Model::new(ModelParams::new(3, 0.45, 0.05), skewed(), ValidationMode::Strict).unwrap();
        let lat = MixtureLattice::build(&m).unwrap();
        let exact = m.exact_marginals();
        assert_eq!(lat.marginal(1), exact[0]);
        assert!((lat.marginal(2) - exact[1]).abs() < 1e-15);
        assert!((lat.marginal(3) - exact[2]).abs() > 1e-6);
        for j in 1..=3 {
            assert!((lat.theorem1_marginal(j).unwrap() - lat.marginal(j)).abs() < 1e-10);
        }
    }
}
