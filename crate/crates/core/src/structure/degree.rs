use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::lineage::{LineageGraph, RelationType};

/// Which edges count towards a node's in-degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeScope {
    Overall,
    Finetune,
    Adapter,
    Quantized,
    Merge,
}

impl DegreeScope {
    pub const ALL: [DegreeScope; 5] = [
        DegreeScope::Overall,
        DegreeScope::Finetune,
        DegreeScope::Adapter,
        DegreeScope::Quantized,
        DegreeScope::Merge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DegreeScope::Overall => "overall",
            DegreeScope::Finetune => "finetune",
            DegreeScope::Adapter => "adapter",
            DegreeScope::Quantized => "quantized",
            DegreeScope::Merge => "merge",
        }
    }

    pub fn admits(self, relation: RelationType) -> bool {
        match self {
            DegreeScope::Overall => true,
            DegreeScope::Finetune => relation == RelationType::Finetune,
            DegreeScope::Adapter => relation == RelationType::Adapter,
            DegreeScope::Quantized => relation == RelationType::Quantized,
            DegreeScope::Merge => relation == RelationType::Merge,
        }
    }
}

/// In-degree histogram over every node of the graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    pub scope: DegreeScope,
    /// degree → number of nodes with that degree.
    pub histogram: BTreeMap<u64, u64>,
}

impl DegreeDistribution {
    pub fn from_degrees(scope: DegreeScope, degrees: impl IntoIterator<Item = u64>) -> Self {
        let mut histogram = BTreeMap::new();
        for d in degrees {
            *histogram.entry(d).or_default() += 1;
        }
        DegreeDistribution { scope, histogram }
    }

    pub fn node_count(&self) -> u64 {
        self.histogram.values().sum()
    }

    /// Σ degree · count, i.e. the number of edges in scope.
    pub fn edge_count(&self) -> u64 {
        self.histogram.iter().map(|(d, c)| d * c).sum()
    }

    pub fn max_degree(&self) -> Option<u64> {
        self.histogram.keys().next_back().copied()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "degree,count")?;
        for (d, c) in &self.histogram {
            writeln!(out, "{d},{c}")?;
        }
        out.flush()
    }
}

/// In-degree (number of direct derivatives) of every node, counting only
/// edges admitted by `scope`.
pub fn in_degrees(graph: &LineageGraph, scope: DegreeScope) -> DegreeDistribution {
    let mut degree = vec![0u64; graph.node_count()];
    for e in graph.edges().iter().filter(|e| scope.admits(e.relation)) {
        degree[e.parent] += 1;
    }
    DegreeDistribution::from_degrees(scope, degree)
}
