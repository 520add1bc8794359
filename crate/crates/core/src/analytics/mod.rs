//! Correlational and temporal summaries of MDI values.

mod groups;
mod lowess;
mod scale;
mod stats;
mod temporal;
mod trend;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use groups::{group_summaries, GroupSummaries};
pub use lowess::lowess;
pub use scale::{extract_param_scale, ParamScale, ScaleBucket};
pub use stats::{average_ranks, pearson, spearman, MdiSummary, StatsError, HISTOGRAM_BINS};
pub use temporal::{
    default_period_boundaries, temporal_report, MonthlyRow, PeriodRow, TemporalReport, WindowRow,
    DEFAULT_PERIOD_BOUNDARIES,
};
pub use trend::{in_degree_trend, zero_crossing, TrendFit, TrendOptions, TrendPoint};

use crate::disruption::MdiResult;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("period boundaries must be strictly increasing")]
    UnsortedBoundaries,
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Overall MDI distribution for one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdiOverview {
    pub window_days: u32,
    pub summary: MdiSummary,
    /// Focal models with at least one subsequent model in the window.
    pub with_subsequent: usize,
    /// Focal models with none, retained with MDI exactly zero.
    pub empty_window: usize,
}

pub fn mdi_overview(rows: &[MdiResult], window_days: u32) -> MdiOverview {
    let rows: Vec<&MdiResult> = rows
        .iter()
        .filter(|r| r.eligible && r.window_days == window_days)
        .collect();
    let values: Vec<f64> = rows.iter().map(|r| r.mdi).collect();
    let with_subsequent = rows.iter().filter(|r| r.has_subsequent()).count();
    MdiOverview {
        window_days,
        summary: MdiSummary::of("overall", &values),
        with_subsequent,
        empty_window: rows.len() - with_subsequent,
    }
}

/// `label,n,mean,median,positive_fraction` rows for a set of summaries.
pub fn write_summaries_csv<W: Write>(
    group: &str,
    summaries: &[MdiSummary],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{group},n,mean,median,positive_fraction")?;
    for s in summaries {
        temporal::write_summary_line(&mut out, &s.label, s)?;
    }
    out.flush()
}
