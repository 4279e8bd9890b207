//! Seeded path simulation.
//!
//! Replicate `r` draws from its own stream, seeded by mixing `(seed, r)`
//! with a splitmix64 finalizer, so the empirical law depends only on
//! `(model, samples, seed)` and never on scheduling or thread count.

use rayon::prelude::*;

use crate::chain::Model;
use crate::pmf::Pmf;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const BLOCK: u64 = 4096;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Splitmix64 stream for one replicate.
#[derive(Debug, Clone)]
pub struct ReplicateStream {
    state: u64,
}

impl ReplicateStream {
    pub fn new(seed: u64, replicate: u64) -> Self {
        Self { state: mix64(seed) ^ mix64(replicate.wrapping_add(1).wrapping_mul(GAMMA)) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub samples: u64,
    pub seed: u64,
    /// Replicates that understood exactly `k` sessions.
    pub counts: Vec<u64>,
    pub empirical: Pmf,
    pub tv_to_exact: Option<f64>,
}

impl SimulationResult {
    /// Records the total variation distance to `exact`.
    pub fn with_exact(mut self, exact: &Pmf) -> Self {
        self.tv_to_exact = Some(tv_distance(&self.empirical, exact));
        self
    }

    pub fn mean(&self) -> f64 {
        self.empirical.mean()
    }

    /// Unbiased sample standard deviation of `B_n`.
    pub fn std_dev(&self) -> f64 {
        if self.samples < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let ss: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * (k as f64 - mean).powi(2))
            .sum();
        (ss / (self.samples - 1) as f64).sqrt()
    }

    pub fn standard_error(&self) -> f64 {
        self.std_dev() / (self.samples as f64).sqrt()
    }
}

/// Simulates `samples` independent courses.
///
/// # Panics
///
/// If `samples == 0`.
pub fn sample_paths(model: &Model, samples: u64, seed: u64) -> SimulationResult {
    assert!(samples >= 1, "at least one replicate is required");
    let n = model.n();
    // success[j-1][k] = P[understand session j | k understood so far]
    let success: Vec<Vec<f64>> = (1..=n)
        .map(|j| (0..j).map(|k| model.session_success_prob(k, j)).collect())
        .collect();
    let blocks = samples.div_ceil(BLOCK);
    let counts = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut counts = vec![0u64; n + 1];
            for r in b * BLOCK..((b + 1) * BLOCK).min(samples) {
                let mut stream = ReplicateStream::new(seed, r);
                let mut k = 0;
                for row in &success {
                    if stream.next_f64() < row[k] {
                        k += 1;
                    }
                }
                counts[k] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let empirical = Pmf::from_vec(counts.iter().map(|&c| c as f64 / samples as f64).collect());
    SimulationResult { samples, seed, counts, empirical, tv_to_exact: None }
}

/// Half the L1 distance between two pmfs on the same support.
///
/// # Panics
///
/// If the supports differ in length.
pub fn tv_distance(a: &Pmf, b: &Pmf) -> f64 {
    assert_eq!(a.len(), b.len(), "pmf supports differ");
    let l1: f64 = a.probs().iter().zip(b.probs()).map(|(x, y)| (x - y).abs()).sum();
    (0.5 * l1).min(1.0)
}
