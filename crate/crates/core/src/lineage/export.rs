//! Tab-separated graph exports. Both files are sorted by model id and have
//! no header row.
//!
//! * `edges.tsv`: `child_id \t parent_id \t relation`
//! * `nodes.tsv`: `model_id \t created_at \t param_scale \t roles`
//!
//! `created_at` and `param_scale` are empty when unknown; `roles` is
//! comma-joined.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::graph::NodeInfo;
use super::{GraphError, LineageGraph, RelationType};
use crate::time::{format_timestamp, parse_timestamp};

pub const EDGES_FILE: &str = "edges.tsv";
pub const NODES_FILE: &str = "nodes.tsv";

pub fn write_edge_list<W: Write>(graph: &LineageGraph, mut out: W) -> std::io::Result<()> {
    for e in graph.edges() {
        writeln!(
            out,
            "{}\t{}\t{}",
            graph.node(e.child).model_id,
            graph.node(e.parent).model_id,
            e.relation.as_str()
        )?;
    }
    out.flush()
}

pub fn write_node_table<W: Write>(graph: &LineageGraph, mut out: W) -> std::io::Result<()> {
    for (idx, node) in graph.nodes().iter().enumerate() {
        let created = node.created_at.map(format_timestamp).unwrap_or_default();
        let scale = node.param_scale.map(|s| s.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            node.model_id,
            created,
            scale,
            graph.roles(idx)
        )?;
    }
    out.flush()
}

/// Writes `edges.tsv` and `nodes.tsv` into `dir`, creating it if needed.
pub fn write_exports(graph: &LineageGraph, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut edges = Vec::new();
    write_edge_list(graph, &mut edges)?;
    fs::write(dir.join(EDGES_FILE), edges)?;
    let mut nodes = Vec::new();
    write_node_table(graph, &mut nodes)?;
    fs::write(dir.join(NODES_FILE), nodes)
}

/// Rebuilds a graph from the files [`write_exports`] wrote. Nodes without a
/// creation time are read back as stubs.
pub fn read_exports(dir: &Path) -> Result<LineageGraph, GraphError> {
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read_to_string(&path).map_err(|source| GraphError::Io { path, source })
    };
    let bad = |file: &str, line: usize, reason: &str| GraphError::BadExport {
        file: file.to_string(),
        line,
        reason: reason.to_string(),
    };

    let mut nodes = Vec::new();
    for (i, line) in read(NODES_FILE)?.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(bad(NODES_FILE, i + 1, "expected 4 columns"));
        }
        let created_at = match cols[1] {
            "" => None,
            ts => Some(parse_timestamp(ts).ok_or_else(|| bad(NODES_FILE, i + 1, "bad timestamp"))?),
        };
        let param_scale = match cols[2] {
            "" => None,
            s => Some(
                s.parse::<f64>()
                    .map_err(|_| bad(NODES_FILE, i + 1, "bad param_scale"))?,
            ),
        };
        nodes.push(NodeInfo {
            model_id: cols[0].to_string(),
            created_at,
            param_scale,
            stub: created_at.is_none(),
        });
    }

    let mut edges = Vec::new();
    for (i, line) in read(EDGES_FILE)?.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(bad(EDGES_FILE, i + 1, "expected 3 columns"));
        }
        let relation = RelationType::from_tag(cols[2])
            .ok_or_else(|| bad(EDGES_FILE, i + 1, "unknown relation"))?;
        edges.push((cols[0].to_string(), cols[1].to_string(), relation));
    }
    LineageGraph::from_parts(nodes, edges)
}
