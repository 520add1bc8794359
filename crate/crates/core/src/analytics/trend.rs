use std::io::Write;

use serde::{Deserialize, Serialize};

use super::lowess::lowess;
use super::stats::{spearman, StatsError};
use crate::disruption::MdiResult;
use crate::lineage::LineageGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendOptions {
    pub frac: f64,
    pub robust_iters: usize,
    /// Smooth against `ln(in_degree)` instead of the raw in-degree.
    pub log_x: bool,
}

impl Default for TrendOptions {
    fn default() -> Self {
        TrendOptions {
            frac: 0.3,
            robust_iters: 2,
            log_x: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub in_degree: u64,
    pub smoothed_mdi: f64,
}

/// MDI against in-degree: rank correlation plus a LOWESS curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    pub options: TrendOptions,
    pub n: usize,
    /// `None` when either input is constant.
    pub spearman_rho: Option<f64>,
    /// One point per distinct in-degree, ascending.
    pub points: Vec<TrendPoint>,
    /// In-degree where the smoothed curve first rises above zero.
    pub zero_crossing: Option<f64>,
    /// Smoothed values pulled back into the observed MDI range.
    pub clamped_points: usize,
}

impl TrendFit {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "in_degree,smoothed_mdi")?;
        for p in &self.points {
            writeln!(out, "{},{}", p.in_degree, p.smoothed_mdi)?;
        }
        out.flush()
    }
}

/// Fits the trend over MDI rows of a single window. Smoothed values are
/// clamped to the observed MDI range, since a local linear fit can
/// overshoot near the ends of the data.
pub fn in_degree_trend(
    rows: &[MdiResult],
    graph: &LineageGraph,
    options: TrendOptions,
) -> Result<TrendFit, StatsError> {
    let mut pairs: Vec<(u64, f64)> = rows
        .iter()
        .filter(|r| r.eligible)
        .filter_map(|r| {
            graph
                .index_of(&r.focal_id)
                .map(|i| (graph.in_degree(i) as u64, r.mdi))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let degrees: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
    let mdi: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let axis: Vec<f64> = if options.log_x {
        degrees.iter().map(|d| d.max(1.0).ln()).collect()
    } else {
        degrees.clone()
    };

    let smoothed = lowess(&axis, &mdi, options.frac, options.robust_iters)?;
    let spearman_rho = match spearman(&degrees, &mdi) {
        Ok(rho) => Some(rho),
        Err(StatsError::Constant) => None,
        Err(e) => return Err(e),
    };

    let lo = mdi.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = mdi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut clamped_points = 0;
    let mut points: Vec<TrendPoint> = Vec::new();
    for (&(deg, _), &s) in pairs.iter().zip(&smoothed) {
        if points.last().is_some_and(|p| p.in_degree == deg) {
            continue;
        }
        let v = s.clamp(lo, hi);
        if v != s {
            clamped_points += 1;
        }
        points.push(TrendPoint {
            in_degree: deg,
            smoothed_mdi: v,
        });
    }

    Ok(TrendFit {
        options,
        n: pairs.len(),
        spearman_rho,
        zero_crossing: zero_crossing(&points),
        points,
        clamped_points,
    })
}

/// Linear interpolation between the last point at or below zero and the
/// first point above it. `points` must be sorted by in-degree.
pub fn zero_crossing(points: &[TrendPoint]) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        (a.smoothed_mdi <= 0.0 && b.smoothed_mdi > 0.0).then(|| {
            let (x0, x1) = (a.in_degree as f64, b.in_degree as f64);
            x0 + (0.0 - a.smoothed_mdi) * (x1 - x0) / (b.smoothed_mdi - a.smoothed_mdi)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(in_degree: u64, smoothed_mdi: f64) -> TrendPoint {
        TrendPoint {
            in_degree,
            smoothed_mdi,
        }
    }

    #[test]
    fn interpolated_crossing() {
        assert_eq!(zero_crossing(&[pt(100, -0.1), pt(200, 0.1)]), Some(150.0));
    }

    #[test]
    fn negative_curve_never_crosses() {
        assert_eq!(zero_crossing(&[pt(1, -0.9), pt(5, -0.4), pt(9, -0.1)]), None);
    }

    #[test]
    fn first_crossing_wins() {
        let pts = [pt(1, -1.0), pt(3, 1.0), pt(5, -1.0), pt(7, 1.0)];
        assert_eq!(zero_crossing(&pts), Some(2.0));
    }

    #[test]
    fn touching_zero_then_rising() {
        assert_eq!(zero_crossing(&[pt(4, 0.0), pt(8, 0.5)]), Some(4.0));
    }
}
