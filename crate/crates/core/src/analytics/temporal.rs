use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::stats::MdiSummary;
use super::AnalyticsError;
use crate::disruption::MdiResult;
use crate::lineage::LineageGraph;
use crate::time::{format_date, parse_date, YearMonth};

/// Releases of Llama 1 (March 2023), Llama 3 (April 2024) and Qwen 3
/// (April 2025).
pub const DEFAULT_PERIOD_BOUNDARIES: [&str; 3] = ["2023-03-01", "2024-04-01", "2025-04-01"];

pub fn default_period_boundaries() -> Vec<i64> {
    DEFAULT_PERIOD_BOUNDARIES
        .iter()
        .map(|d| parse_date(d).expect("valid constant date"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlyRow {
    /// `YYYY-MM`, UTC.
    pub month: String,
    /// Every model with a known creation time, eligible or not.
    pub new_models: usize,
    /// Eligible focal models created this month.
    pub eligible: usize,
    pub positive: usize,
    pub positive_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRow {
    /// Inclusive start date; `None` for the open first period.
    pub start: Option<String>,
    /// Exclusive end date; `None` for the open last period.
    pub end: Option<String>,
    pub summary: MdiSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    pub window_days: u32,
    pub x_total: u64,
    pub y_total: u64,
    pub z_total: u64,
    pub summary: MdiSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalReport {
    pub main_window: u32,
    pub monthly: Vec<MonthlyRow>,
    pub periods: Vec<PeriodRow>,
    pub windows: Vec<WindowRow>,
}

impl TemporalReport {
    pub fn write_monthly_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "month,new_models,eligible,positive,positive_fraction")?;
        for r in &self.monthly {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.month,
                r.new_models,
                r.eligible,
                r.positive,
                r.positive_fraction.map(|f| f.to_string()).unwrap_or_default()
            )?;
        }
        out.flush()
    }

    pub fn write_periods_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "period,start,end,n,mean,median,positive_fraction")?;
        for p in &self.periods {
            write_summary_line(
                &mut out,
                &format!(
                    "{},{},{}",
                    p.summary.label,
                    p.start.as_deref().unwrap_or(""),
                    p.end.as_deref().unwrap_or("")
                ),
                &p.summary,
            )?;
        }
        out.flush()
    }

    pub fn write_windows_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "window_days,x_total,y_total,z_total,n,mean,median,positive_fraction")?;
        for w in &self.windows {
            write_summary_line(
                &mut out,
                &format!("{},{},{},{}", w.window_days, w.x_total, w.y_total, w.z_total),
                &w.summary,
            )?;
        }
        out.flush()
    }
}

pub(crate) fn write_summary_line<W: Write>(
    out: &mut W,
    prefix: &str,
    s: &MdiSummary,
) -> std::io::Result<()> {
    let opt = |v: Option<f64>| v.map(|f| f.to_string()).unwrap_or_default();
    writeln!(
        out,
        "{},{},{},{},{}",
        prefix,
        s.n,
        opt(s.mean),
        opt(s.median),
        opt(s.positive_fraction)
    )
}

/// Monthly release counts with the share of positive MDI, per-period MDI
/// distributions, and per-window distributions.
///
/// `rows` may hold several windows; monthly and period figures use
/// `main_window`. Periods are half-open `[start, next_start)`.
pub fn temporal_report(
    rows: &[MdiResult],
    graph: &LineageGraph,
    period_boundaries: &[i64],
    main_window: u32,
) -> Result<TemporalReport, AnalyticsError> {
    if period_boundaries.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalyticsError::UnsortedBoundaries);
    }
    let created = |id: &str| graph.index_of(id).and_then(|i| graph.node(i).created_at);

    let mut months: BTreeMap<YearMonth, MonthlyRow> = BTreeMap::new();
    let blank = |ym: YearMonth| MonthlyRow {
        month: ym.to_string(),
        new_models: 0,
        eligible: 0,
        positive: 0,
        positive_fraction: None,
    };
    for node in graph.nodes() {
        if let Some(t) = node.created_at {
            let ym = YearMonth::of(t);
            months.entry(ym).or_insert_with(|| blank(ym)).new_models += 1;
        }
    }
    if let (Some(&first), Some(&last)) = (months.keys().next(), months.keys().next_back()) {
        let mut ym = first;
        while ym < last {
            ym = ym.next();
            months.entry(ym).or_insert_with(|| blank(ym));
        }
    }

    let main: Vec<&MdiResult> = rows
        .iter()
        .filter(|r| r.eligible && r.window_days == main_window)
        .collect();
    let mut period_values: Vec<Vec<f64>> = vec![Vec::new(); period_boundaries.len() + 1];
    for r in &main {
        let Some(t) = created(&r.focal_id) else { continue };
        let row = months.get_mut(&YearMonth::of(t)).expect("every dated node has a month");
        row.eligible += 1;
        if r.mdi > 0.0 {
            row.positive += 1;
        }
        let period = period_boundaries.partition_point(|&b| b <= t);
        period_values[period].push(r.mdi);
    }
    for row in months.values_mut() {
        if row.eligible > 0 {
            row.positive_fraction = Some(row.positive as f64 / row.eligible as f64);
        }
    }

    let periods = period_values
        .iter()
        .enumerate()
        .map(|(i, values)| {
            let start = (i > 0).then(|| format_date(period_boundaries[i - 1]));
            let end = period_boundaries.get(i).map(|&b| format_date(b));
            let label = match (&start, &end) {
                (None, Some(e)) => format!("before {e}"),
                (Some(s), Some(e)) => format!("{s} to {e}"),
                (Some(s), None) => format!("from {s}"),
                (None, None) => "all".to_string(),
            };
            PeriodRow {
                summary: MdiSummary::of(label, values),
                start,
                end,
            }
        })
        .collect();

    let mut by_window: BTreeMap<u32, (u64, u64, u64, Vec<f64>)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.eligible) {
        let e = by_window.entry(r.window_days).or_default();
        e.0 += r.x_count;
        e.1 += r.y_count;
        e.2 += r.z_count;
        e.3.push(r.mdi);
    }
    let windows = by_window
        .into_iter()
        .map(|(w, (x, y, z, values))| WindowRow {
            window_days: w,
            x_total: x,
            y_total: y,
            z_total: z,
            summary: MdiSummary::of(format!("{w} days"), &values),
        })
        .collect();

    Ok(TemporalReport {
        main_window,
        monthly: months.into_values().collect(),
        periods,
        windows,
    })
}
