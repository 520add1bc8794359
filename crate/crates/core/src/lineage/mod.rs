//! Lineage network construction: typed parent links from metadata, cleaning,
//! and the immutable DAG every analysis reads.

mod build;
pub mod export;
mod graph;
mod links;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use build::{build_graph, CleaningReport, DropCounts};
pub use graph::{Census, Edge, LineageGraph, NodeIdx, NodeInfo, Role, RoleSet};
pub use links::{extract, extract_links, Extraction, LinkSource, ParentLink};

/// How a derived model was produced from its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationType {
    Finetune,
    Adapter,
    Quantized,
    Merge,
    /// Parent known, strategy not. Never survives into a graph.
    Unspecified,
}

impl RelationType {
    pub const TYPED: [RelationType; 4] = [
        RelationType::Finetune,
        RelationType::Adapter,
        RelationType::Quantized,
        RelationType::Merge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationType::Finetune => "finetune",
            RelationType::Adapter => "adapter",
            RelationType::Quantized => "quantized",
            RelationType::Merge => "merge",
            RelationType::Unspecified => "unspecified",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "finetune" => Some(RelationType::Finetune),
            "adapter" => Some(RelationType::Adapter),
            "quantized" => Some(RelationType::Quantized),
            "merge" => Some(RelationType::Merge),
            "unspecified" => Some(RelationType::Unspecified),
            _ => None,
        }
    }
}

impl std::fmt::Display for RelationType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("unknown model id {0:?}")]
    UnknownNode(String),
    #[error("model id {0:?} appears twice")]
    DuplicateNode(String),
    #[error("self-loop on {0:?}")]
    SelfLoop(String),
    #[error("edge {child:?} -> {parent:?} has no relation type")]
    UntypedEdge { child: String, parent: String },
    #[error("edge {child:?} -> {parent:?} appears twice")]
    DuplicateEdge { child: String, parent: String },
    #[error("the edges contain a directed cycle")]
    Cycle,
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file} line {line}: {reason}")]
    BadExport {
        file: String,
        line: usize,
        reason: String,
    },
}
