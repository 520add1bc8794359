use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GraphError, RelationType};

/// Position of a node in [`LineageGraph::nodes`]. Nodes are stored in
/// lexicographic model-id order, so index order is id order.
pub type NodeIdx = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeInfo {
    pub model_id: String,
    /// Unknown for stub nodes.
    pub created_at: Option<i64>,
    /// Parameter count read from the model id, when it names one.
    pub param_scale: Option<f64>,
    /// Referenced as a parent but absent from the snapshot.
    pub stub: bool,
}

impl NodeInfo {
    pub fn new(model_id: impl Into<String>, created_at: Option<i64>) -> Self {
        let model_id = model_id.into();
        let param_scale = crate::analytics::extract_param_scale(&model_id).raw;
        NodeInfo {
            model_id,
            created_at,
            param_scale,
            stub: false,
        }
    }

    pub fn stub(model_id: impl Into<String>) -> Self {
        NodeInfo {
            stub: true,
            ..NodeInfo::new(model_id, None)
        }
    }
}

/// A derivation edge pointing from the derived model to its predecessor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub child: NodeIdx,
    pub parent: NodeIdx,
    pub relation: RelationType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Base,
    Finetuned,
    Adapter,
    Quantized,
    Merged,
}

impl Role {
    pub const ALL: [Role; 5] = [
        Role::Base,
        Role::Finetuned,
        Role::Adapter,
        Role::Quantized,
        Role::Merged,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Base => "base",
            Role::Finetuned => "finetuned",
            Role::Adapter => "adapter",
            Role::Quantized => "quantized",
            Role::Merged => "merged",
        }
    }

    /// Role a node takes on through an outgoing edge of `relation`.
    pub fn derived_from(relation: RelationType) -> Option<Role> {
        match relation {
            RelationType::Finetune => Some(Role::Finetuned),
            RelationType::Adapter => Some(Role::Adapter),
            RelationType::Quantized => Some(Role::Quantized),
            RelationType::Merge => Some(Role::Merged),
            RelationType::Unspecified => None,
        }
    }
}

/// Small set of [`Role`]s.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct RoleSet(u8);

impl RoleSet {
    fn bit(role: Role) -> u8 {
        1 << role as u8
    }

    pub fn insert(&mut self, role: Role) {
        self.0 |= Self::bit(role);
    }

    pub fn contains(self, role: Role) -> bool {
        self.0 & Self::bit(role) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Role> {
        Role::ALL.into_iter().filter(move |r| self.contains(*r))
    }
}

impl FromIterator<Role> for RoleSet {
    fn from_iter<I: IntoIterator<Item = Role>>(iter: I) -> Self {
        let mut set = RoleSet::default();
        iter.into_iter().for_each(|r| set.insert(r));
        set
    }
}

impl fmt::Display for RoleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Role::as_str).collect();
        f.write_str(&names.join(","))
    }
}

/// Node and edge counts by role.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub nodes: usize,
    pub edges: usize,
    pub base: usize,
    pub finetuned: usize,
    pub adapter: usize,
    pub quantized: usize,
    pub merged: usize,
    pub stub_nodes: usize,
    /// `2 * edges / nodes`, zero for an empty graph.
    pub mean_degree: f64,
}

/// Immutable lineage DAG. Edges run child → parent, so a node's in-degree
/// is its number of direct derivatives and its out-degree its number of
/// parents.
#[derive(Debug, Clone, PartialEq)]
pub struct LineageGraph {
    nodes: Vec<NodeInfo>,
    index: HashMap<String, NodeIdx>,
    edges: Vec<Edge>,
    parents: Vec<Vec<(NodeIdx, RelationType)>>,
    /// Sorted by `(created_at, index)`; unknown timestamps first.
    children: Vec<Vec<NodeIdx>>,
}

impl LineageGraph {
    /// Assembles a graph, checking every structural invariant: unique node
    /// ids, known endpoints, no self-loops, no untyped edges, at most one
    /// edge per ordered pair, and no directed cycle.
    pub fn from_parts<I, S>(mut nodes: Vec<NodeInfo>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (S, S, RelationType)>,
        S: AsRef<str>,
    {
        nodes.sort_by(|a, b| a.model_id.cmp(&b.model_id));
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if index.insert(node.model_id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(node.model_id.clone()));
            }
        }

        let mut seen = HashSet::new();
        let mut edge_list = Vec::new();
        for (child, parent, relation) in edges {
            let (child, parent) = (child.as_ref(), parent.as_ref());
            let lookup = |id: &str| {
                index
                    .get(id)
                    .copied()
                    .ok_or_else(|| GraphError::UnknownNode(id.to_string()))
            };
            let (c, p) = (lookup(child)?, lookup(parent)?);
            if c == p {
                return Err(GraphError::SelfLoop(child.to_string()));
            }
            if relation == RelationType::Unspecified {
                return Err(GraphError::UntypedEdge {
                    child: child.to_string(),
                    parent: parent.to_string(),
                });
            }
            if !seen.insert((c, p)) {
                return Err(GraphError::DuplicateEdge {
                    child: child.to_string(),
                    parent: parent.to_string(),
                });
            }
            edge_list.push(Edge {
                child: c,
                parent: p,
                relation,
            });
        }
        edge_list.sort_by_key(|e| (e.child, e.parent));

        let mut parents = vec![Vec::new(); nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        for e in &edge_list {
            parents[e.child].push((e.parent, e.relation));
            children[e.parent].push(e.child);
        }
        for list in &mut children {
            list.sort_by_key(|&c| (nodes[c].created_at, c));
        }

        let graph = LineageGraph {
            nodes,
            index,
            edges: edge_list,
            parents,
            children,
        };
        if graph.topological_order().is_none() {
            return Err(GraphError::Cycle);
        }
        Ok(graph)
    }

    pub fn empty() -> Self {
        LineageGraph::from_parts(Vec::new(), Vec::<(String, String, RelationType)>::new())
            .expect("empty graph is valid")
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeInfo] {
        &self.nodes
    }

    pub fn node(&self, idx: NodeIdx) -> &NodeInfo {
        &self.nodes[idx]
    }

    pub fn index_of(&self, model_id: &str) -> Option<NodeIdx> {
        self.index.get(model_id).copied()
    }

    /// Edges sorted by `(child id, parent id)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Direct parents with the relation of each edge, sorted by parent id.
    pub fn parents_of(&self, idx: NodeIdx) -> &[(NodeIdx, RelationType)] {
        &self.parents[idx]
    }

    /// Direct derivatives sorted by creation time.
    pub fn children_of(&self, idx: NodeIdx) -> &[NodeIdx] {
        &self.children[idx]
    }

    pub fn in_degree(&self, idx: NodeIdx) -> usize {
        self.children[idx].len()
    }

    pub fn out_degree(&self, idx: NodeIdx) -> usize {
        self.parents[idx].len()
    }

    pub fn has_edge(&self, child: NodeIdx, parent: NodeIdx) -> bool {
        self.parents[child].iter().any(|&(p, _)| p == parent)
    }

    /// Base when the node has no parents; otherwise one derived role per
    /// relation type among its outgoing edges.
    pub fn roles(&self, idx: NodeIdx) -> RoleSet {
        if self.parents[idx].is_empty() {
            return [Role::Base].into_iter().collect();
        }
        self.parents[idx]
            .iter()
            .filter_map(|&(_, rel)| Role::derived_from(rel))
            .collect()
    }

    pub fn node_roles(&self, model_id: &str) -> Result<RoleSet, GraphError> {
        self.index_of(model_id)
            .map(|idx| self.roles(idx))
            .ok_or_else(|| GraphError::UnknownNode(model_id.to_string()))
    }

    pub fn census(&self) -> Census {
        let mut census = Census {
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            stub_nodes: self.nodes.iter().filter(|n| n.stub).count(),
            ..Census::default()
        };
        for idx in 0..self.nodes.len() {
            for role in self.roles(idx).iter() {
                *match role {
                    Role::Base => &mut census.base,
                    Role::Finetuned => &mut census.finetuned,
                    Role::Adapter => &mut census.adapter,
                    Role::Quantized => &mut census.quantized,
                    Role::Merged => &mut census.merged,
                } += 1;
            }
        }
        if census.nodes > 0 {
            census.mean_degree = 2.0 * census.edges as f64 / census.nodes as f64;
        }
        census
    }

    /// Kahn's algorithm over child → parent edges; `None` if a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<NodeIdx>> {
        topological_order(self.nodes.len(), self.edges.iter().map(|e| (e.child, e.parent)))
    }
}

pub(crate) fn topological_order(
    n: usize,
    edges: impl Iterator<Item = (NodeIdx, NodeIdx)>,
) -> Option<Vec<NodeIdx>> {
    let mut indeg = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for (from, to) in edges {
        out[from].push(to);
        indeg[to] += 1;
    }
    let mut queue: Vec<NodeIdx> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop() {
        order.push(v);
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use RelationType::*;

    fn chain() -> LineageGraph {
        let nodes = vec![
            NodeInfo::new("A", Some(0)),
            NodeInfo::new("B", Some(10)),
            NodeInfo::new("C", Some(20)),
        ];
        LineageGraph::from_parts(nodes, [("B", "A", Finetune), ("C", "B", Finetune)]).unwrap()
    }

    #[test]
    fn chain_census() {
        let c = chain().census();
        assert_eq!((c.nodes, c.edges, c.base, c.finetuned), (3, 2, 1, 2));
        assert!((c.mean_degree - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_census_is_zero() {
        assert_eq!(LineageGraph::empty().census(), Census::default());
    }

    #[test]
    fn roles_follow_outgoing_edges() {
        let g = chain();
        assert_eq!(g.node_roles("A").unwrap().to_string(), "base");
        assert_eq!(g.node_roles("B").unwrap().to_string(), "finetuned");
        assert!(matches!(g.node_roles("Z"), Err(GraphError::UnknownNode(_))));
    }

    #[test]
    fn multi_relation_node_carries_each_role() {
        let nodes = vec![
            NodeInfo::new("P", Some(0)),
            NodeInfo::new("Q", Some(0)),
            NodeInfo::new("M", Some(5)),
        ];
        let g = LineageGraph::from_parts(nodes, [("M", "P", Merge), ("M", "Q", Quantized)]).unwrap();
        let roles = g.node_roles("M").unwrap();
        assert_eq!(roles.len(), 2);
        assert!(roles.contains(Role::Merged) && roles.contains(Role::Quantized));
    }

    #[test]
    fn invariants_are_enforced() {
        let nodes = || vec![NodeInfo::new("A", Some(0)), NodeInfo::new("B", Some(1))];
        assert!(matches!(
            LineageGraph::from_parts(nodes(), [("A", "A", Finetune)]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            LineageGraph::from_parts(nodes(), [("B", "A", Unspecified)]),
            Err(GraphError::UntypedEdge { .. })
        ));
        assert!(matches!(
            LineageGraph::from_parts(nodes(), [("B", "A", Finetune), ("B", "A", Adapter)]),
            Err(GraphError::DuplicateEdge { .. })
        ));
        assert!(matches!(
            LineageGraph::from_parts(nodes(), [("B", "X", Finetune)]),
            Err(GraphError::UnknownNode(_))
        ));
        assert!(matches!(
            LineageGraph::from_parts(nodes(), [("B", "A", Finetune), ("A", "B", Finetune)]),
            Err(GraphError::Cycle)
        ));
    }

    #[test]
    fn children_sorted_by_time() {
        let nodes = vec![
            NodeInfo::new("P", Some(0)),
            NodeInfo::new("a", Some(30)),
            NodeInfo::new("b", Some(10)),
            NodeInfo::new("c", Some(20)),
        ];
        let g = LineageGraph::from_parts(
            nodes,
            [("a", "P", Finetune), ("b", "P", Finetune), ("c", "P", Adapter)],
        )
        .unwrap();
        let p = g.index_of("P").unwrap();
        let ids: Vec<&str> = g
            .children_of(p)
            .iter()
            .map(|&c| g.node(c).model_id.as_str())
            .collect();
        assert_eq!(ids, ["b", "c", "a"]);
    }
}
