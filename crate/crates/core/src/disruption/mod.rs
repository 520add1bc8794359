//! The Model Disruption Index.
//!
//! For a focal model `i` with parent set `P_i`, the subsequent models are
//! those created in `(created_i, created_i + t days]` that derive directly
//! from `i` or from a member of `P_i`. They split into
//!
//! * `X`: derive from `i` and from no member of `P_i`,
//! * `Y`: derive from `i` and from at least one member of `P_i`,
//! * `Z`: derive from a member of `P_i` but not from `i`,
//!
//! and `MDI = (X - Z) / (X + Y + Z + eps)`. Positive values mean downstream
//! development moved to the focal model; negative values mean it stayed
//! with the predecessors.

mod classify;
mod oracle;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use classify::{classify_subsequent, parent_set, Classification, ParentSet};
pub use oracle::mdi_oracle;

use crate::lineage::{LineageGraph, NodeIdx};
use classify::classify_idx;

/// Keeps the empty window at exactly zero without visibly moving the ±1
/// extremes.
pub const DEFAULT_EPSILON: f64 = 1e-9;
pub const MAIN_WINDOW_DAYS: u32 = 90;
pub const SENSITIVITY_WINDOWS: [u32; 6] = [30, 60, 90, 120, 150, 180];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MdiError {
    #[error("unknown focal model {0:?}")]
    UnknownFocal(String),
    #[error("observation windows must be positive day counts")]
    InvalidWindow,
    #[error("at least one observation window is required")]
    NoWindows,
    #[error("epsilon must be a positive finite number, got {0}")]
    InvalidEpsilon(f64),
}

/// Why a model gets no MDI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ineligibility {
    /// No parents.
    #[serde(rename = "base_model")]
    BaseModel,
    /// No derivatives anywhere in the dataset.
    #[serde(rename = "terminal_model")]
    TerminalModel,
    /// Creation time unknown, so no window can be anchored.
    #[serde(rename = "parent_timestamp_unknown")]
    TimestampUnknown,
}

impl Ineligibility {
    pub fn code(self) -> &'static str {
        match self {
            Ineligibility::BaseModel => "base_model",
            Ineligibility::TerminalModel => "terminal_model",
            Ineligibility::TimestampUnknown => "parent_timestamp_unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdiResult {
    pub focal_id: String,
    pub window_days: u32,
    pub x_count: u64,
    pub y_count: u64,
    pub z_count: u64,
    pub mdi: f64,
    pub eligible: bool,
    pub ineligibility_reason: Option<Ineligibility>,
}

impl MdiResult {
    fn ineligible(focal_id: &str, window_days: u32, reason: Ineligibility) -> Self {
        MdiResult {
            focal_id: focal_id.to_string(),
            window_days,
            x_count: 0,
            y_count: 0,
            z_count: 0,
            mdi: 0.0,
            eligible: false,
            ineligibility_reason: Some(reason),
        }
    }

    pub(crate) fn from_counts(
        focal_id: &str,
        window_days: u32,
        (x, y, z): (u64, u64, u64),
        epsilon: f64,
    ) -> Self {
        MdiResult {
            focal_id: focal_id.to_string(),
            window_days,
            x_count: x,
            y_count: y,
            z_count: z,
            mdi: compute_mdi(x, y, z, epsilon),
            eligible: true,
            ineligibility_reason: None,
        }
    }

    /// Whether any subsequent model fell inside the window.
    pub fn has_subsequent(&self) -> bool {
        self.x_count + self.y_count + self.z_count > 0
    }
}

/// `(x - z) / (x + y + z + epsilon)`.
pub fn compute_mdi(x: u64, y: u64, z: u64, epsilon: f64) -> f64 {
    debug_assert!(epsilon > 0.0);
    (x as f64 - z as f64) / ((x + y + z) as f64 + epsilon)
}

/// `None` when the node is an intermediate model with a known creation time.
pub fn eligibility(graph: &LineageGraph, idx: NodeIdx) -> Option<Ineligibility> {
    if graph.out_degree(idx) == 0 {
        Some(Ineligibility::BaseModel)
    } else if graph.in_degree(idx) == 0 {
        Some(Ineligibility::TerminalModel)
    } else if graph.node(idx).created_at.is_none() {
        Some(Ineligibility::TimestampUnknown)
    } else {
        None
    }
}

/// Intermediate models (at least one parent and one derivative, known
/// creation time), sorted by model id.
pub fn eligible_focal_models(graph: &LineageGraph) -> Vec<String> {
    eligible_indices(graph)
        .into_iter()
        .map(|i| graph.node(i).model_id.clone())
        .collect()
}

pub(crate) fn eligible_indices(graph: &LineageGraph) -> Vec<NodeIdx> {
    (0..graph.node_count())
        .filter(|&i| eligibility(graph, i).is_none())
        .collect()
}

fn check_epsilon(epsilon: f64) -> Result<(), MdiError> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(MdiError::InvalidEpsilon(epsilon))
    }
}

/// MDI of one model. Ineligible models come back with `eligible == false`
/// and the reason.
pub fn evaluate(
    graph: &LineageGraph,
    focal_id: &str,
    window_days: u32,
    epsilon: f64,
) -> Result<MdiResult, MdiError> {
    check_epsilon(epsilon)?;
    if window_days == 0 {
        return Err(MdiError::InvalidWindow);
    }
    let idx = graph
        .index_of(focal_id)
        .ok_or_else(|| MdiError::UnknownFocal(focal_id.to_string()))?;
    Ok(match eligibility(graph, idx) {
        Some(reason) => MdiResult::ineligible(focal_id, window_days, reason),
        None => MdiResult::from_counts(
            focal_id,
            window_days,
            classify_idx(graph, idx, window_days).counts(),
            epsilon,
        ),
    })
}

/// One result per eligible focal model per window, ordered by
/// `(focal_id, window_days)`. Runs on the current rayon pool.
pub fn mdi_sweep(
    graph: &LineageGraph,
    windows: &[u32],
    epsilon: f64,
) -> Result<Vec<MdiResult>, MdiError> {
    use rayon::prelude::*;

    check_epsilon(epsilon)?;
    if windows.is_empty() {
        return Err(MdiError::NoWindows);
    }
    if windows.contains(&0) {
        return Err(MdiError::InvalidWindow);
    }
    let mut windows = windows.to_vec();
    windows.sort_unstable();
    windows.dedup();

    let focal = eligible_indices(graph);
    let rows: Vec<Vec<MdiResult>> = focal
        .par_iter()
        .map(|&idx| {
            let id = &graph.node(idx).model_id;
            windows
                .iter()
                .map(|&w| MdiResult::from_counts(id, w, classify_idx(graph, idx, w).counts(), epsilon))
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// CSV with header `focal_id,window_days,x,y,z,mdi,eligible,reason`. MDI
/// values are written at full precision.
pub fn write_mdi_csv<W: Write>(rows: &[MdiResult], mut out: W) -> std::io::Result<()> {
    writeln!(out, "focal_id,window_days,x,y,z,mdi,eligible,reason")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.focal_id,
            r.window_days,
            r.x_count,
            r.y_count,
            r.z_count,
            r.mdi,
            r.eligible,
            r.ineligibility_reason.map_or("", Ineligibility::code)
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lineage::{NodeInfo, RelationType::Finetune};
    use crate::time::SECONDS_PER_DAY;

    #[test]
    fn worked_example_value() {
        assert!((compute_mdi(3, 1, 2, DEFAULT_EPSILON) - 1.0 / 6.0).abs() < 1e-9);
        assert_eq!(compute_mdi(0, 0, 0, DEFAULT_EPSILON), 0.0);
        assert!((compute_mdi(5, 0, 0, 1e-9) - 1.0).abs() < 1e-9);
        assert!((compute_mdi(0, 0, 4, 1e-9) + 1.0).abs() < 1e-9);
    }

    fn chain(c_days_after_b: i64) -> LineageGraph {
        let nodes = vec![
            NodeInfo::new("A", Some(0)),
            NodeInfo::new("B", Some(10 * SECONDS_PER_DAY)),
            NodeInfo::new("C", Some((10 + c_days_after_b) * SECONDS_PER_DAY)),
        ];
        LineageGraph::from_parts(nodes, [("B", "A", Finetune), ("C", "B", Finetune)]).unwrap()
    }

    #[test]
    fn chain_eligibility() {
        let g = chain(40);
        assert_eq!(eligible_focal_models(&g), vec!["B"]);
        let a = evaluate(&g, "A", 90, DEFAULT_EPSILON).unwrap();
        assert_eq!(a.ineligibility_reason, Some(Ineligibility::BaseModel));
        let c = evaluate(&g, "C", 90, DEFAULT_EPSILON).unwrap();
        assert_eq!(c.ineligibility_reason, Some(Ineligibility::TerminalModel));
    }

    #[test]
    fn chain_window_sweep() {
        let g = chain(40);
        let rows = mdi_sweep(&g, &[90, 30], DEFAULT_EPSILON).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].window_days, rows[0].x_count, rows[0].mdi), (30, 0, 0.0));
        assert_eq!((rows[1].window_days, rows[1].x_count), (90, 1));
        assert!((rows[1].mdi - 1.0).abs() < 1e-8);
    }

    #[test]
    fn window_upper_bound_is_inclusive() {
        let g = chain(30);
        let r = evaluate(&g, "B", 30, DEFAULT_EPSILON).unwrap();
        assert_eq!(r.x_count, 1);
    }

    #[test]
    fn bad_arguments() {
        let g = chain(40);
        assert_eq!(mdi_sweep(&g, &[], 1e-9), Err(MdiError::NoWindows));
        assert_eq!(mdi_sweep(&g, &[0], 1e-9), Err(MdiError::InvalidWindow));
        assert_eq!(mdi_sweep(&g, &[30], 0.0), Err(MdiError::InvalidEpsilon(0.0)));
        assert!(matches!(
            evaluate(&g, "nope", 30, 1e-9),
            Err(MdiError::UnknownFocal(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let g = chain(40);
        let rows = mdi_sweep(&g, &[90], DEFAULT_EPSILON).unwrap();
        let mut buf = Vec::new();
        write_mdi_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("focal_id,window_days,x,y,z,mdi,eligible,reason"));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&fields[..5], ["B", "90", "1", "0", "0"]);
        let mdi: f64 = fields[5].parse().unwrap();
        assert_eq!(mdi, 1.0 / (1.0 + DEFAULT_EPSILON));
        assert_eq!(&fields[6..], ["true", ""]);
    }
}
