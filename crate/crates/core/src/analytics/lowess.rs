//! LOWESS: locally weighted linear regression with tricube neighborhood
//! weights and bisquare robustness re-weighting.

use super::stats::{check_pair, StatsError};

pub const MIN_POINTS: usize = 5;

#[inline]
fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u * u;
        t * t * t
    }
}

#[inline]
fn bisquare(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u;
        t * t
    }
}

/// Smoothed value at every input point, in input order.
///
/// Each point is fitted from its `round(frac * n)` nearest neighbors (at
/// least 2) by weighted least squares with tricube distance weights; each
/// of the `robust_iters` extra passes multiplies in bisquare weights of the
/// previous residuals scaled by six times their median absolute value.
pub fn lowess(xs: &[f64], ys: &[f64], frac: f64, robust_iters: usize) -> Result<Vec<f64>, StatsError> {
    check_pair(xs, ys, MIN_POINTS)?;
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(StatsError::InvalidParameter(format!(
            "frac must be in (0, 1], got {frac}"
        )));
    }
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let x: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let y: Vec<f64> = order.iter().map(|&i| ys[i]).collect();

    let k = ((frac * n as f64).round() as usize).clamp(2, n);
    let range = x[n - 1] - x[0];
    let y_scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));

    let mut robustness = vec![1.0; n];
    let mut fitted = vec![0.0; n];
    for pass in 0..=robust_iters {
        let mut lo = 0;
        for i in 0..n {
            while lo + k < n && x[i] - x[lo] > x[lo + k] - x[i] {
                lo += 1;
            }
            let hi = lo + k;
            let h = (x[i] - x[lo]).max(x[hi - 1] - x[i]);
            fitted[i] = local_fit(&x, &y, &robustness, i, lo, hi, h, range);
        }
        if pass == robust_iters {
            break;
        }
        let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        let mut abs: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            abs[n / 2]
        } else {
            (abs[n / 2 - 1] + abs[n / 2]) / 2.0
        };
        if median <= 1e-12 * y_scale {
            break;
        }
        for (w, r) in robustness.iter_mut().zip(&residuals) {
            *w = bisquare(r / (6.0 * median));
        }
    }

    let mut out = vec![0.0; n];
    for (pos, &i) in order.iter().enumerate() {
        out[i] = fitted[pos];
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn local_fit(
    x: &[f64],
    y: &[f64],
    robustness: &[f64],
    i: usize,
    lo: usize,
    hi: usize,
    h: f64,
    range: f64,
) -> f64 {
    let xi = x[i];
    let mut w = Vec::with_capacity(hi - lo);
    for j in lo..hi {
        let d = (x[j] - xi).abs();
        let dist_w = if h > 0.0 {
            if d <= 1e-3 * h {
                1.0
            } else {
                tricube(d / h)
            }
        } else {
            1.0
        };
        w.push(dist_w * robustness[j]);
    }
    let sw: f64 = w.iter().sum();
    if sw <= 0.0 {
        return y[i];
    }
    let xbar = (lo..hi).zip(&w).map(|(j, wj)| wj * x[j]).sum::<f64>() / sw;
    let ybar = (lo..hi).zip(&w).map(|(j, wj)| wj * y[j]).sum::<f64>() / sw;
    let sxx: f64 = (lo..hi).zip(&w).map(|(j, wj)| wj * (x[j] - xbar).powi(2)).sum();
    // slope only when the weighted x spread is not negligible
    if (sxx / sw).sqrt() > 1e-3 * range {
        let sxy: f64 = (lo..hi)
            .zip(&w)
            .map(|(j, wj)| wj * (x[j] - xbar) * (y[j] - ybar))
            .sum();
        ybar + sxy / sxx * (xi - xbar)
    } else {
        ybar
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_points() {
        assert!(matches!(
            lowess(&[1.0, 2.0, 3.0, 4.0], &[1.0; 4], 0.5, 0),
            Err(StatsError::TooFew { .. })
        ));
    }

    #[test]
    fn constant_is_preserved() {
        let xs: Vec<f64> = (0..30).map(|i| (i * 7 % 11) as f64).collect();
        let out = lowess(&xs, &[0.25; 30], 0.3, 2).unwrap();
        assert!(out.iter().all(|v| (v - 0.25).abs() < 1e-12));
    }

    #[test]
    fn unsorted_linear_input_reproduced_in_place() {
        let xs = [5.0, 1.0, 4.0, 2.0, 3.0, 0.0, 9.0, 7.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let out = lowess(&xs, &ys, 0.5, 2).unwrap();
        for (a, b) in out.iter().zip(&ys) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_frac() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert!(lowess(&xs, &xs, 0.0, 0).is_err());
        assert!(lowess(&xs, &xs, 1.5, 0).is_err());
    }
}
