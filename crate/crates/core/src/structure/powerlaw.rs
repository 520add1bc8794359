//! Discrete power-law fitting with x_min selection by minimum
//! Kolmogorov–Smirnov distance.
//!
//! The exponent is the discrete maximum-likelihood estimate in its
//! continuous approximation, `alpha = 1 + n / Σ ln(x_i / (x_min - 0.5))`,
//! and the fitted CDF uses the same approximation,
//! `P(X <= x) = 1 - ((x + 0.5) / (x_min - 0.5))^(1 - alpha)`.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::DegreeDistribution;

/// Fewest observations (overall, and per candidate tail) a fit accepts.
pub const MIN_TAIL: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub x_min: u64,
    /// KS distance between the empirical and fitted tail CDFs.
    pub ks_d: f64,
    /// Observations with degree ≥ x_min.
    pub n_tail: u64,
    /// `(alpha - 1) / sqrt(n_tail)`.
    pub alpha_std_err: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("insufficient tail: {observations} positive observation(s), need at least {required}")]
    InsufficientTail { observations: u64, required: u64 },
    #[error("degenerate input: every candidate tail holds a single distinct value")]
    Degenerate,
    #[error("empty x_min search range")]
    EmptyRange,
}

/// Fits the positive part of `dist`. `x_min_search` defaults to
/// `[1, 95th percentile of positive degrees]`; zero-degree nodes are never
/// part of a fit.
pub fn fit_power_law(
    dist: &DegreeDistribution,
    x_min_search: Option<RangeInclusive<u64>>,
) -> Result<PowerLawFit, FitError> {
    let values: Vec<(u64, u64)> = dist
        .histogram
        .iter()
        .filter(|(&d, &c)| d >= 1 && c > 0)
        .map(|(&d, &c)| (d, c))
        .collect();
    fit_counts(&values, x_min_search)
}

/// Same as [`fit_power_law`] over raw samples.
pub fn fit_power_law_samples(
    samples: &[u64],
    x_min_search: Option<RangeInclusive<u64>>,
) -> Result<PowerLawFit, FitError> {
    let dist = DegreeDistribution::from_degrees(super::DegreeScope::Overall, samples.iter().copied());
    fit_power_law(&dist, x_min_search)
}

/// `values`: ascending distinct positive values with their counts.
fn fit_counts(
    values: &[(u64, u64)],
    x_min_search: Option<RangeInclusive<u64>>,
) -> Result<PowerLawFit, FitError> {
    let total: u64 = values.iter().map(|&(_, c)| c).sum();
    if total < MIN_TAIL {
        return Err(FitError::InsufficientTail {
            observations: total,
            required: MIN_TAIL,
        });
    }
    let range = x_min_search.unwrap_or_else(|| 1..=percentile(values, total, 0.95));
    let (lo, hi) = ((*range.start()).max(1), *range.end());
    if lo > hi {
        return Err(FitError::EmptyRange);
    }

    let mut best: Option<PowerLawFit> = None;
    let mut saw_sized_tail = false;
    for x_min in lo..=hi {
        let start = values.partition_point(|&(v, _)| v < x_min);
        let tail = &values[start..];
        let n: u64 = tail.iter().map(|&(_, c)| c).sum();
        if n < MIN_TAIL {
            // tails only shrink as x_min grows
            break;
        }
        saw_sized_tail = true;
        if tail.len() < 2 {
            continue;
        }
        let fit = fit_tail(tail, x_min, n);
        if best.map_or(true, |b| fit.ks_d < b.ks_d) {
            best = Some(fit);
        }
    }
    match best {
        Some(fit) => Ok(fit),
        None if saw_sized_tail => Err(FitError::Degenerate),
        None => Err(FitError::InsufficientTail {
            observations: total,
            required: MIN_TAIL,
        }),
    }
}

fn fit_tail(tail: &[(u64, u64)], x_min: u64, n: u64) -> PowerLawFit {
    let shift = x_min as f64 - 0.5;
    let log_sum: f64 = tail
        .iter()
        .map(|&(v, c)| c as f64 * (v as f64 / shift).ln())
        .sum();
    let alpha = 1.0 + n as f64 / log_sum;
    let cdf = |x: u64| 1.0 - ((x as f64 + 0.5) / shift).powf(1.0 - alpha);

    // Both CDFs step only at integers. Between consecutive observed values
    // the empirical CDF is flat and the fitted one rises, so the largest gap
    // on each flat stretch sits at one of its ends.
    let mut d: f64 = 0.0;
    if tail[0].0 > x_min {
        d = d.max(cdf(tail[0].0 - 1));
    }
    let mut cum = 0u64;
    for (k, &(v, c)) in tail.iter().enumerate() {
        cum += c;
        let emp = cum as f64 / n as f64;
        d = d.max((emp - cdf(v)).abs());
        if let Some(&(next, _)) = tail.get(k + 1) {
            if next - 1 > v {
                d = d.max((emp - cdf(next - 1)).abs());
            }
        }
    }
    PowerLawFit {
        alpha,
        x_min,
        ks_d: d,
        n_tail: n,
        alpha_std_err: (alpha - 1.0) / (n as f64).sqrt(),
    }
}

/// Nearest-rank percentile of the expanded sample.
fn percentile(values: &[(u64, u64)], total: u64, q: f64) -> u64 {
    let rank = ((q * total as f64).ceil() as u64).clamp(1, total);
    let mut cum = 0;
    for &(v, c) in values {
        cum += c;
        if cum >= rank {
            return v;
        }
    }
    values.last().map_or(1, |&(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_observations() {
        assert!(matches!(
            fit_power_law_samples(&[1, 2, 3, 0, 0], None),
            Err(FitError::InsufficientTail { observations: 3, .. })
        ));
    }

    #[test]
    fn constant_input_is_rejected() {
        assert_eq!(
            fit_power_law_samples(&[5; 200], None),
            Err(FitError::Degenerate)
        );
    }

    #[test]
    fn percentile_is_nearest_rank() {
        let values = [(1, 50), (2, 45), (9, 5)];
        assert_eq!(percentile(&values, 100, 0.95), 2);
        assert_eq!(percentile(&values, 100, 0.96), 9);
    }

    #[test]
    fn ks_distance_matches_direct_scan() {
        // direct scan over every integer up to the max
        let samples: Vec<u64> = (1..=40).map(|i| 1 + (400 / (i * i))).collect();
        let fit = fit_power_law_samples(&samples, Some(2..=2)).unwrap();
        let tail: Vec<u64> = samples.iter().copied().filter(|&v| v >= 2).collect();
        let n = tail.len() as f64;
        let max = *tail.iter().max().unwrap();
        let mut d: f64 = 0.0;
        for x in 2..=max {
            let emp = tail.iter().filter(|&&v| v <= x).count() as f64 / n;
            let fitted = 1.0 - ((x as f64 + 0.5) / 1.5).powf(1.0 - fit.alpha);
            d = d.max((emp - fitted).abs());
        }
        assert!((fit.ks_d - d).abs() < 1e-12, "{} vs {}", fit.ks_d, d);
    }
}
