use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("inputs differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {required} points, got {n}")]
    TooFew { n: usize, required: usize },
    #[error("correlation is undefined for constant input")]
    Constant,
    #[error("non-finite input value")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub(crate) fn check_pair(xs: &[f64], ys: &[f64], required: usize) -> Result<(), StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < required {
        return Err(StatsError::TooFew {
            n: xs.len(),
            required,
        });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// 1-based ranks; tied values share the average of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    check_pair(xs, ys, 2)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::Constant);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    check_pair(xs, ys, 3)?;
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Number of equal-width histogram bins over `[-1, 1]`.
pub const HISTOGRAM_BINS: usize = 20;

/// Distribution summary of a set of MDI values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdiSummary {
    pub label: String,
    pub n: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    /// Counts over [`HISTOGRAM_BINS`] equal bins on `[-1, 1]`; the last bin
    /// is closed on the right.
    pub histogram: Vec<u64>,
    /// Share of values strictly above zero.
    pub positive_fraction: Option<f64>,
}

impl MdiSummary {
    pub fn of(label: impl Into<String>, values: &[f64]) -> Self {
        let n = values.len();
        let mut histogram = vec![0u64; HISTOGRAM_BINS];
        for &v in values {
            histogram[histogram_bin(v)] += 1;
        }
        let (mean, median, positive_fraction) = if n == 0 {
            (None, None, None)
        } else {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            let median = if n % 2 == 1 {
                sorted[n / 2]
            } else {
                (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
            };
            let positive = values.iter().filter(|&&v| v > 0.0).count();
            (
                Some(values.iter().sum::<f64>() / n as f64),
                Some(median),
                Some(positive as f64 / n as f64),
            )
        };
        MdiSummary {
            label: label.into(),
            n,
            mean,
            median,
            histogram,
            positive_fraction,
        }
    }

    /// Lower edges of the histogram bins.
    pub fn bin_edges() -> Vec<f64> {
        (0..=HISTOGRAM_BINS)
            .map(|i| -1.0 + 2.0 * i as f64 / HISTOGRAM_BINS as f64)
            .collect()
    }
}

fn histogram_bin(v: f64) -> usize {
    let pos = ((v.clamp(-1.0, 1.0) + 1.0) / 2.0 * HISTOGRAM_BINS as f64).floor() as usize;
    pos.min(HISTOGRAM_BINS - 1)
}
