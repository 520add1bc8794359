//! Brute-force MDI used to cross-check [`super::mdi_sweep`]. It reads only
//! the flat node and edge lists: no id index, no adjacency lists, no
//! time-sorted children.

use super::{check_epsilon, Ineligibility, MdiError, MdiResult};
use crate::lineage::LineageGraph;
use crate::time::SECONDS_PER_DAY;

pub fn mdi_oracle(
    graph: &LineageGraph,
    focal_id: &str,
    window_days: u32,
    epsilon: f64,
) -> Result<MdiResult, MdiError> {
    check_epsilon(epsilon)?;
    if window_days == 0 {
        return Err(MdiError::InvalidWindow);
    }
    let nodes = graph.nodes();
    let edges = graph.edges();
    let focal = nodes
        .iter()
        .position(|n| n.model_id == focal_id)
        .ok_or_else(|| MdiError::UnknownFocal(focal_id.to_string()))?;

    let reason = if !edges.iter().any(|e| e.child == focal) {
        Some(Ineligibility::BaseModel)
    } else if !edges.iter().any(|e| e.parent == focal) {
        Some(Ineligibility::TerminalModel)
    } else if nodes[focal].created_at.is_none() {
        Some(Ineligibility::TimestampUnknown)
    } else {
        None
    };
    if let Some(reason) = reason {
        return Ok(MdiResult::ineligible(focal_id, window_days, reason));
    }

    let start = nodes[focal].created_at.expect("checked above");
    let end = start + i64::from(window_days) * SECONDS_PER_DAY;
    let mut is_parent = vec![false; nodes.len()];
    for e in edges.iter().filter(|e| e.child == focal) {
        is_parent[e.parent] = true;
    }

    let mut to_focal = vec![false; nodes.len()];
    let mut to_parent = vec![false; nodes.len()];
    for e in edges {
        if e.parent == focal {
            to_focal[e.child] = true;
        }
        if is_parent[e.parent] {
            to_parent[e.child] = true;
        }
    }

    let (mut x, mut y, mut z) = (0u64, 0u64, 0u64);
    for (j, node) in nodes.iter().enumerate() {
        if j == focal {
            continue;
        }
        let Some(t) = node.created_at else { continue };
        if t <= start || t > end {
            continue;
        }
        match (to_focal[j], to_parent[j]) {
            (true, false) => x += 1,
            (true, true) => y += 1,
            (false, true) => z += 1,
            (false, false) => {}
        }
    }
    Ok(MdiResult::from_counts(focal_id, window_days, (x, y, z), epsilon))
}
