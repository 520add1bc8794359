use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::graph::{topological_order, NodeIdx, NodeInfo};
use super::links::{extract, LinkSource, ParentLink};
use super::{LineageGraph, RelationType};
use crate::ingest::Snapshot;

/// Links removed during cleaning, by reason. Each raw link is counted under
/// exactly one reason or survives as an edge.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounts {
    pub empty_parent: usize,
    pub self_loop: usize,
    pub unspecified: usize,
    pub duplicate: usize,
    pub cycle_break: usize,
}

impl DropCounts {
    pub fn total(&self) -> usize {
        self.empty_parent + self.self_loop + self.unspecified + self.duplicate + self.cycle_break
    }
}

/// What [`build_graph`] did to the raw links.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub records: usize,
    pub raw_links: usize,
    /// Raw links by the metadata field they came from.
    pub links_by_source: BTreeMap<String, usize>,
    pub dropped: DropCounts,
    /// Untyped links from card fields. Cards carry no relation type, so these
    /// are lost unless the same pair is also declared with a typed tag.
    pub card_links_dropped: usize,
    /// Duplicate pairs whose declarations named different relation types.
    pub relation_conflicts: usize,
    /// Records that declared at least one parent but kept none. They are
    /// treated as base models.
    pub parentless_after_cleaning: usize,
    /// `base_model:*` tags outside the accepted grammar.
    pub ignored_tags: usize,
    /// Parents referenced by some record but absent from the snapshot.
    pub stub_nodes: usize,
    /// Records created before the platform's earliest timestamp.
    pub before_platform_floor: usize,
    pub nodes: usize,
    pub edges: usize,
}

impl CleaningReport {
    /// `edges == raw_links - dropped.total()`.
    pub fn reconciles(&self) -> bool {
        self.raw_links.checked_sub(self.dropped.total()) == Some(self.edges)
    }
}

/// Extracts, cleans and assembles the lineage DAG.
///
/// Cleaning order: links with an empty parent, self-loops and untyped links
/// are dropped; remaining links to the same `(child, parent)` pair are
/// collapsed to one, preferring tag-sourced declarations; parents missing
/// from the snapshot become stub nodes; finally every directed cycle is
/// broken by removing its edge whose child was created earliest, so later
/// models keep deriving from earlier ones.
pub fn build_graph(snapshot: &Snapshot) -> (LineageGraph, CleaningReport) {
    let mut report = CleaningReport {
        records: snapshot.len(),
        before_platform_floor: snapshot.iter().filter(|r| r.before_platform_floor()).count(),
        ..CleaningReport::default()
    };
    if snapshot.is_empty() {
        log::warn!("empty snapshot; the lineage graph has no nodes");
        return (LineageGraph::empty(), report);
    }

    let mut candidates: Vec<ParentLink> = Vec::new();
    for rec in snapshot.iter() {
        let extraction = extract(rec);
        report.ignored_tags += extraction.ignored_tags;
        report.raw_links += extraction.links.len();
        let had_links = !extraction.links.is_empty();
        let before = candidates.len();

        // per record: (parent) -> position in `candidates`
        let mut by_parent: BTreeMap<String, usize> = BTreeMap::new();
        for link in extraction.links {
            *report
                .links_by_source
                .entry(link.source.as_str().to_string())
                .or_default() += 1;
            if link.parent_id.is_empty() {
                report.dropped.empty_parent += 1;
            } else if link.parent_id == link.child_id {
                report.dropped.self_loop += 1;
            } else if link.relation == RelationType::Unspecified {
                report.dropped.unspecified += 1;
                if matches!(
                    link.source,
                    LinkSource::CardBaseModel | LinkSource::CardDataBaseModel
                ) {
                    report.card_links_dropped += 1;
                }
            } else if let Some(&pos) = by_parent.get(&link.parent_id) {
                report.dropped.duplicate += 1;
                let kept = &mut candidates[pos];
                if kept.relation != link.relation {
                    report.relation_conflicts += 1;
                }
                if link.source < kept.source {
                    *kept = link;
                }
            } else {
                by_parent.insert(link.parent_id.clone(), candidates.len());
                candidates.push(link);
            }
        }
        if had_links && candidates.len() == before {
            report.parentless_after_cleaning += 1;
        }
    }

    let mut nodes: Vec<NodeInfo> = snapshot
        .iter()
        .map(|r| NodeInfo::new(r.model_id.clone(), Some(r.created_at)))
        .collect();
    let stubs: BTreeSet<&str> = candidates
        .iter()
        .map(|l| l.parent_id.as_str())
        .filter(|p| snapshot.get(p).is_none())
        .collect();
    report.stub_nodes = stubs.len();
    nodes.extend(stubs.into_iter().map(NodeInfo::stub));
    nodes.sort_by(|a, b| a.model_id.cmp(&b.model_id));

    let removed = break_cycles(&nodes, &candidates);
    report.dropped.cycle_break = removed.len();
    let edges = candidates
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, l)| (l.child_id.as_str(), l.parent_id.as_str(), l.relation));

    let graph = LineageGraph::from_parts(nodes, edges)
        .expect("cleaned links satisfy every graph invariant");
    report.nodes = graph.node_count();
    report.edges = graph.edge_count();
    debug_assert!(report.reconciles());
    (graph, report)
}

/// Returns positions in `links` whose removal leaves the link set acyclic.
/// `nodes` must be sorted by model id.
fn break_cycles(nodes: &[NodeInfo], links: &[ParentLink]) -> BTreeSet<usize> {
    let idx = |id: &str| {
        nodes
            .binary_search_by(|n| n.model_id.as_str().cmp(id))
            .expect("every endpoint is a node")
    };
    let edges: Vec<(NodeIdx, NodeIdx)> = links
        .iter()
        .map(|l| (idx(&l.child_id), idx(&l.parent_id)))
        .collect();
    let mut removed = BTreeSet::new();

    loop {
        let alive = || {
            edges
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed.contains(i))
        };
        if topological_order(nodes.len(), alive().map(|(_, &e)| e)).is_some() {
            return removed;
        }
        let residual = residual_nodes(nodes.len(), alive().map(|(_, &e)| e));

        // Every residual node has an incoming edge from another residual
        // node, so walking those edges backwards must revisit a node.
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for (i, &(child, parent)) in alive() {
            if residual[child] && residual[parent] {
                incoming[parent].push(i);
            }
        }
        let start = (0..nodes.len()).find(|&v| residual[v]).expect("a cycle exists");
        let mut position = vec![usize::MAX; nodes.len()];
        let mut path_edges: Vec<usize> = Vec::new();
        let mut v = start;
        while position[v] == usize::MAX {
            position[v] = path_edges.len();
            let e = incoming[v][0];
            path_edges.push(e);
            v = edges[e].0;
        }
        let cycle = &path_edges[position[v]..];

        let victim = *cycle
            .iter()
            .min_by(|&&a, &&b| {
                let key = |e: usize| {
                    let child = &nodes[edges[e].0];
                    (
                        child.created_at.unwrap_or(i64::MAX),
                        child.model_id.as_str(),
                        nodes[edges[e].1].model_id.as_str(),
                    )
                };
                key(a).cmp(&key(b))
            })
            .expect("cycles are non-empty");
        log::warn!(
            "breaking lineage cycle: dropping {} -> {}",
            links[victim].child_id,
            links[victim].parent_id
        );
        removed.insert(victim);
    }
}

/// Nodes left over after peeling every node with no incoming edge.
fn residual_nodes(n: usize, edges: impl Iterator<Item = (NodeIdx, NodeIdx)>) -> Vec<bool> {
    let mut indeg = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for (from, to) in edges {
        out[from].push(to);
        indeg[to] += 1;
    }
    let mut residual = vec![true; n];
    let mut stack: Vec<NodeIdx> = (0..n).filter(|&i| indeg[i] == 0).collect();
    while let Some(v) = stack.pop() {
        residual[v] = false;
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    residual
}
