use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::lineage::{LineageGraph, NodeIdx};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WccSummary {
    pub component_count: usize,
    /// Node counts, largest first.
    pub component_sizes: Vec<usize>,
    /// Largest component's share of all nodes; zero for an empty graph.
    pub largest_share: f64,
    pub largest_component_edges: usize,
}

impl WccSummary {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "component_rank,size")?;
        for (rank, size) in self.component_sizes.iter().enumerate() {
            writeln!(out, "{},{}", rank + 1, size)?;
        }
        out.flush()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Component label of every node over the undirected view of the edges.
/// Each label is the smallest node index in its component, so the labeling
/// does not depend on how the components were discovered.
pub fn component_labels(graph: &LineageGraph) -> Vec<NodeIdx> {
    let n = graph.node_count();
    let mut uf = UnionFind::new(n);
    for e in graph.edges() {
        uf.union(e.child, e.parent);
    }
    let mut smallest = vec![usize::MAX; n];
    for v in 0..n {
        let root = uf.find(v);
        smallest[root] = smallest[root].min(v);
    }
    (0..n).map(|v| smallest[uf.find(v)]).collect()
}

pub fn weakly_connected_components(graph: &LineageGraph) -> WccSummary {
    let labels = component_labels(graph);
    let n = labels.len();
    let mut sizes = vec![0usize; n];
    let mut edges = vec![0usize; n];
    for &l in &labels {
        sizes[l] += 1;
    }
    for e in graph.edges() {
        edges[labels[e.child]] += 1;
    }
    let mut comps: Vec<(usize, usize)> = (0..n)
        .filter(|&l| sizes[l] > 0)
        .map(|l| (sizes[l], edges[l]))
        .collect();
    comps.sort_by(|a, b| b.cmp(a));
    WccSummary {
        component_count: comps.len(),
        largest_share: comps.first().map_or(0.0, |&(s, _)| s as f64 / n as f64),
        largest_component_edges: comps.first().map_or(0, |&(_, e)| e),
        component_sizes: comps.into_iter().map(|(s, _)| s).collect(),
    }
}
