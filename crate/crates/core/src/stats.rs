// Copyright 2026 The blindqc Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Distributions over bitstrings and binomial confidence intervals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Finite distribution keyed by bitstrings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Distribution(BTreeMap<Vec<u8>, f64>);

impl Distribution {
    pub fn new() -> Distribution {
        Distribution(BTreeMap::new())
    }

    pub fn add(&mut self, outcome: Vec<u8>, weight: f64) {
        *self.0.entry(outcome).or_insert(0.0) += weight;
    }

    pub fn merge(&mut self, other: &Distribution) {
        for (k, w) in &other.0 {
            *self.0.entry(k.clone()).or_insert(0.0) += *w;
        }
    }

    /// Empirical distribution of a sample.
    pub fn from_samples<I: IntoIterator<Item = Vec<u8>>>(samples: I) -> Distribution {
        let mut d = Distribution::new();
        let mut n = 0usize;
        for s in samples {
            d.add(s, 1.0);
            n += 1;
        }
        if n > 0 {
            d.0.values_mut().for_each(|w| *w /= n as f64);
        }
        d
    }

    pub fn probability(&self, outcome: &[u8]) -> f64 {
        self.0.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u8>, f64)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    /// Total-variation distance `½ Σ |p - q|`.
    pub fn tv_distance(&self, other: &Distribution) -> f64 {
        let mut sum = 0.0;
        for (k, p) in &self.0 {
            sum += (p - other.probability(k)).abs();
        }
        for (k, q) in &other.0 {
            if !self.0.contains_key(k) {
                sum += q.abs();
            }
        }
        sum / 2.0
    }
}

/// Point estimate of a Bernoulli rate with a Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// z-value of a two-sided 95% interval.
pub const Z_95: f64 = 1.959_963_984_540_054;

impl Estimate {
    pub fn wilson(successes: u64, trials: u64, z: f64) -> Estimate {
        if trials == 0 {
            return Estimate {
                successes,
                trials,
                estimate: 0.0,
                ci_low: 0.0,
                ci_high: 1.0,
            };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Estimate {
            successes,
            trials,
            estimate: p,
            ci_low: if successes == 0 { 0.0 } else { (centre - half).max(0.0) },
            ci_high: if successes >= trials {
                1.0
            } else {
                (centre + half).min(1.0)
            },
        }
    }

    /// Binomial standard error `sqrt(p(1-p)/n)` of the point estimate.
    pub fn std_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.estimate * (1.0 - self.estimate) / self.trials as f64).sqrt()
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Pearson χ² statistic of observed counts against equal expected counts.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_distance_basics() {
        let mut a = Distribution::new();
        a.add(vec![0], 0.5);
        a.add(vec![1], 0.5);
        let mut b = Distribution::new();
        b.add(vec![0], 1.0);
        assert!((a.tv_distance(&b) - 0.5).abs() < 1e-15);
        assert!((b.tv_distance(&a) - 0.5).abs() < 1e-15);
        assert_eq!(a.tv_distance(&a), 0.0);
        let mut c = Distribution::new();
        c.add(vec![1, 1], 1.0);
        assert!((b.tv_distance(&c) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empirical_distribution() {
        let d = Distribution::from_samples(vec![vec![0], vec![1], vec![1], vec![1]]);
        assert_eq!(d.probability(&[1]), 0.75);
        assert_eq!(d.total(), 1.0);
    }

    #[test]
    fn wilson_interval_reference_values() {
        // 20 of 100 at 95%: (0.1333, 0.2888) from the closed form.
        let e = Estimate::wilson(20, 100, Z_95);
        assert!((e.ci_low - 0.133_367).abs() < 1e-5, "{e:?}");
        assert!((e.ci_high - 0.288_829).abs() < 1e-5, "{e:?}");
        let zero = Estimate::wilson(0, 1000, Z_95);
        assert_eq!(zero.ci_low, 0.0);
        assert!(zero.ci_high > 0.0 && zero.ci_high < 0.01);
        assert!(Estimate::wilson(1000, 1000, Z_95).contains(1.0));
    }

    #[test]
    fn chi_square_of_uniform_counts_is_zero() {
        assert_eq!(chi_square_uniform(&[5, 5, 5, 5]), 0.0);
        assert!((chi_square_uniform(&[6, 4]) - 0.4).abs() < 1e-12);
    }
}
