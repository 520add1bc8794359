use serde::{Deserialize, Serialize};

use super::scale::{extract_param_scale, ScaleBucket};
use super::stats::MdiSummary;
use crate::disruption::MdiResult;
use crate::lineage::{LineageGraph, RelationType};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummaries {
    pub window_days: Option<u32>,
    /// small, medium, large, unknown.
    pub by_scale: Vec<MdiSummary>,
    /// finetune, adapter, quantized, merge.
    pub by_relation: Vec<MdiSummary>,
    /// Focal ids naming more than one scale token.
    pub ambiguous_scale: usize,
}

/// MDI summaries per parameter-scale bucket and per derivation strategy.
///
/// `rows` should hold a single window. A focal model counts once in each
/// relation type among its outgoing edges, so merged-and-quantized models
/// appear in both groups.
pub fn group_summaries(rows: &[MdiResult], graph: &LineageGraph) -> GroupSummaries {
    let mut scale_values: Vec<Vec<f64>> = vec![Vec::new(); ScaleBucket::ALL.len()];
    let mut relation_values: Vec<Vec<f64>> = vec![Vec::new(); RelationType::TYPED.len()];
    let mut ambiguous_scale = 0;

    for row in rows.iter().filter(|r| r.eligible) {
        let scale = extract_param_scale(&row.focal_id);
        if scale.is_ambiguous() {
            ambiguous_scale += 1;
        }
        let bucket = ScaleBucket::ALL
            .iter()
            .position(|b| *b == scale.bucket)
            .expect("bucket is listed");
        scale_values[bucket].push(row.mdi);

        if let Some(idx) = graph.index_of(&row.focal_id) {
            for (slot, rel) in RelationType::TYPED.iter().enumerate() {
                if graph.parents_of(idx).iter().any(|(_, r)| r == rel) {
                    relation_values[slot].push(row.mdi);
                }
            }
        }
    }

    GroupSummaries {
        window_days: rows.first().map(|r| r.window_days),
        by_scale: ScaleBucket::ALL
            .iter()
            .zip(&scale_values)
            .map(|(b, v)| MdiSummary::of(b.as_str(), v))
            .collect(),
        by_relation: RelationType::TYPED
            .iter()
            .zip(&relation_values)
            .map(|(r, v)| MdiSummary::of(r.as_str(), v))
            .collect(),
        ambiguous_scale,
    }
}
