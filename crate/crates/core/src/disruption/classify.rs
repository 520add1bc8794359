use std::collections::BTreeSet;

use super::MdiError;
use crate::lineage::{LineageGraph, NodeIdx};
use crate::time::SECONDS_PER_DAY;

/// A focal model and all of its direct parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentSet {
    pub focal_id: String,
    pub parents: BTreeSet<String>,
}

pub fn parent_set(graph: &LineageGraph, focal_id: &str) -> Result<ParentSet, MdiError> {
    let idx = graph
        .index_of(focal_id)
        .ok_or_else(|| MdiError::UnknownFocal(focal_id.to_string()))?;
    Ok(ParentSet {
        focal_id: focal_id.to_string(),
        parents: graph
            .parents_of(idx)
            .iter()
            .map(|&(p, _)| graph.node(p).model_id.clone())
            .collect(),
    })
}

/// Subsequent models of one focal model, as sorted node indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Classification {
    /// Derive from the focal model only.
    pub x: Vec<NodeIdx>,
    /// Derive from the focal model and at least one parent.
    pub y: Vec<NodeIdx>,
    /// Derive from at least one parent but not the focal model.
    pub z: Vec<NodeIdx>,
}

impl Classification {
    pub fn counts(&self) -> (u64, u64, u64) {
        (self.x.len() as u64, self.y.len() as u64, self.z.len() as u64)
    }
}

/// Splits the models created in `(focal, focal + window_days]` that derive
/// directly from the focal model or its parent set into X, Y and Z.
pub fn classify_subsequent(
    graph: &LineageGraph,
    focal_id: &str,
    window_days: u32,
) -> Result<Classification, MdiError> {
    if window_days == 0 {
        return Err(MdiError::InvalidWindow);
    }
    let idx = graph
        .index_of(focal_id)
        .ok_or_else(|| MdiError::UnknownFocal(focal_id.to_string()))?;
    if graph.node(idx).created_at.is_none() {
        return Ok(Classification::default());
    }
    Ok(classify_idx(graph, idx, window_days))
}

/// Children lists are sorted by creation time, so the window is a
/// contiguous slice of each.
fn in_window<'g>(graph: &LineageGraph, list: &'g [NodeIdx], from: i64, to: i64) -> &'g [NodeIdx] {
    let key = |c: &NodeIdx| graph.node(*c).created_at;
    let start = list.partition_point(|c| key(c) <= Some(from));
    let end = list.partition_point(|c| key(c) <= Some(to));
    &list[start..end.max(start)]
}

pub(crate) fn classify_idx(graph: &LineageGraph, focal: NodeIdx, window_days: u32) -> Classification {
    let Some(start) = graph.node(focal).created_at else {
        return Classification::default();
    };
    let end = start + i64::from(window_days) * SECONDS_PER_DAY;
    let parents: Vec<NodeIdx> = graph.parents_of(focal).iter().map(|&(p, _)| p).collect();

    let mut out = Classification::default();
    for &c in in_window(graph, graph.children_of(focal), start, end) {
        let to_parent = graph
            .parents_of(c)
            .iter()
            .any(|(p, _)| parents.contains(p));
        if to_parent {
            out.y.push(c);
        } else {
            out.x.push(c);
        }
    }
    for &p in &parents {
        for &c in in_window(graph, graph.children_of(p), start, end) {
            if c != focal && !graph.has_edge(c, focal) {
                out.z.push(c);
            }
        }
    }
    out.x.sort_unstable();
    out.y.sort_unstable();
    out.z.sort_unstable();
    out.z.dedup();
    out
}
