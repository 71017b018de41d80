use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::BayesError;

/// Default bound on the number of parents of a single node.
pub const DEFAULT_MAX_PARENTS: usize = 8;

/// Dense index of a node inside a [`BayesianNetwork`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Hidden system parameter or observable verification result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Parameter,
    Observable,
}

/// Conditional probability table of a binary node.
///
/// `table[row]` is `P(node = Pass | parents)`. Rows enumerate parent states as a
/// binary counter over `parents` (Fail = 0, Pass = 1) with the *last* parent as
/// the least-significant bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cpt {
    pub parents: Vec<NodeId>,
    pub table: Vec<f64>,
}

impl Cpt {
    pub fn new(parents: Vec<NodeId>, table: Vec<f64>) -> Self {
        Cpt { parents, table }
    }

    /// Root-node CPT with a single prior entry.
    pub fn prior(p_pass: f64) -> Self {
        Cpt { parents: Vec::new(), table: vec![p_pass] }
    }

    /// Row index for a parent assignment given as Pass flags in parent order.
    pub fn row_index(parent_pass: &[bool]) -> usize {
        parent_pass.iter().fold(0usize, |acc, &pass| (acc << 1) | usize::from(pass))
    }

    /// Probability of Pass under the given parent assignment.
    pub fn p_pass(&self, parent_pass: &[bool]) -> f64 {
        self.table[Self::row_index(parent_pass)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub name: String,
    pub kind: NodeKind,
    pub cpt: Cpt,
}

/// Directed acyclic network of binary nodes.
///
/// Construction through [`BayesianNetwork::new`] validates the structure, so every
/// instance held by the rest of the crate is known to be well-formed.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesianNetwork {
    nodes: Vec<Node>,
    children: Vec<Vec<NodeId>>,
    topo_order: Vec<NodeId>,
}

impl BayesianNetwork {
    pub fn new(nodes: Vec<Node>) -> Result<Self, BayesError> {
        Self::with_parent_cap(nodes, DEFAULT_MAX_PARENTS)
    }

    pub fn with_parent_cap(nodes: Vec<Node>, max_parents: usize) -> Result<Self, BayesError> {
        let topo_order = validate_nodes(&nodes, max_parents)?;
        let mut children = vec![Vec::new(); nodes.len()];
        for node in &nodes {
            for parent in &node.cpt.parents {
                children[parent.0].push(node.id);
            }
        }
        Ok(BayesianNetwork { nodes, children, topo_order })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Result<&Node, BayesError> {
        self.nodes.get(id.0).ok_or(BayesError::UnknownNode(id))
    }

    pub fn kind(&self, id: NodeId) -> Result<NodeKind, BayesError> {
        self.node(id).map(|n| n.kind)
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.children[id.0]
    }

    /// Nodes in a parents-before-children order.
    pub fn topological_order(&self) -> &[NodeId] {
        &self.topo_order
    }

    pub fn find_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().find(|n| n.name == name).map(|n| n.id)
    }

    /// All nodes reachable from `id` along directed edges, excluding `id` itself.
    pub fn descendants(&self, id: NodeId) -> Result<BTreeSet<NodeId>, BayesError> {
        self.node(id)?;
        let mut seen = BTreeSet::new();
        let mut stack: Vec<NodeId> = self.children(id).to_vec();
        while let Some(next) = stack.pop() {
            if seen.insert(next) {
                stack.extend_from_slice(self.children(next));
            }
        }
        Ok(seen)
    }

    /// Marks each seed together with every node that has a directed path into it.
    pub(crate) fn ancestral_closure(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut keep = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(i) = stack.pop() {
            if !keep[i] {
                keep[i] = true;
                stack.extend(self.nodes[i].cpt.parents.iter().map(|p| p.0));
            }
        }
        keep
    }

    pub fn from_json(text: &str) -> Result<Self, BayesError> {
        let file: NetworkFile = serde_json::from_str(text)?;
        file.into_network()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&NetworkFile::from(self)).expect("network serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BayesError> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|source| BayesError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), BayesError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| BayesError::Io { path: path.display().to_string(), source })
    }
}

/// Checks acyclicity, CPT shape and ranges, and the allowed edge types.
pub fn validate_network(nodes: &[Node]) -> Result<(), BayesError> {
    validate_nodes(nodes, DEFAULT_MAX_PARENTS).map(|_| ())
}

fn validate_nodes(nodes: &[Node], max_parents: usize) -> Result<Vec<NodeId>, BayesError> {
    let n = nodes.len();
    for (i, node) in nodes.iter().enumerate() {
        if node.id.0 != i {
            return Err(BayesError::NonDenseIds { position: i, id: node.id });
        }
        let cpt = &node.cpt;
        if cpt.parents.len() > max_parents {
            return Err(BayesError::TooManyParents { count: cpt.parents.len(), cap: max_parents });
        }
        let expected = 1usize << cpt.parents.len();
        if cpt.table.len() != expected {
            return Err(BayesError::MalformedCpt { node: node.id, row: cpt.table.len().min(expected) });
        }
        if let Some(row) = cpt.table.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(BayesError::MalformedCpt { node: node.id, row });
        }
        let mut seen = BTreeSet::new();
        for &parent in &cpt.parents {
            if parent.0 >= n {
                return Err(BayesError::UnknownNode(parent));
            }
            if !seen.insert(parent) {
                return Err(BayesError::MalformedCpt { node: node.id, row: 0 });
            }
            if nodes[parent.0].kind == NodeKind::Observable && node.kind == NodeKind::Parameter {
                return Err(BayesError::IllegalEdge { from: parent, to: node.id });
            }
        }
    }

    // Kahn's algorithm; whatever is left over sits on or behind a cycle.
    let mut indegree: Vec<usize> = nodes.iter().map(|n| n.cpt.parents.len()).collect();
    let mut children = vec![Vec::new(); n];
    for node in nodes {
        for p in &node.cpt.parents {
            children[p.0].push(node.id.0);
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    ready.reverse();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop() {
        order.push(NodeId(i));
        for &c in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(c);
            }
        }
    }
    if order.len() != n {
        let cyclic = (0..n).filter(|&i| indegree[i] > 0).map(NodeId).collect();
        return Err(BayesError::CycleDetected(cyclic));
    }
    Ok(order)
}

/// On-disk JSON shape of a network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkFile {
    pub nodes: Vec<NodeRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub name: String,
    pub kind: NodeKind,
    pub parents: Vec<usize>,
    pub cpt: Vec<f64>,
}

impl NetworkFile {
    pub fn into_network(self) -> Result<BayesianNetwork, BayesError> {
        let nodes = self
            .nodes
            .into_iter()
            .map(|r| Node {
                id: NodeId(r.id),
                name: r.name,
                kind: r.kind,
                cpt: Cpt::new(r.parents.into_iter().map(NodeId).collect(), r.cpt),
            })
            .collect();
        BayesianNetwork::new(nodes)
    }
}

impl From<&BayesianNetwork> for NetworkFile {
    fn from(net: &BayesianNetwork) -> Self {
        NetworkFile {
            nodes: net
                .nodes
                .iter()
                .map(|n| NodeRecord {
                    id: n.id.0,
                    name: n.name.clone(),
                    kind: n.kind,
                    parents: n.cpt.parents.iter().map(|p| p.0).collect(),
                    cpt: n.cpt.table.clone(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: usize, kind: NodeKind, parents: &[usize], table: Vec<f64>) -> Node {
        Node {
            id: NodeId(id),
            name: format!("n{id}"),
            kind,
            cpt: Cpt::new(parents.iter().copied().map(NodeId).collect(), table),
        }
    }

    #[test]
    fn minimal_chain_is_valid() {
        let nodes =
            vec![node(0, NodeKind::Parameter, &[], vec![0.8]), node(1, NodeKind::Observable, &[0], vec![0.2, 0.9])];
        assert!(validate_network(&nodes).is_ok());
    }

    #[test]
    fn observable_to_parameter_edge_is_illegal() {
        let nodes =
            vec![node(0, NodeKind::Observable, &[], vec![0.5]), node(1, NodeKind::Parameter, &[0], vec![0.2, 0.9])];
        assert!(matches!(validate_network(&nodes), Err(BayesError::IllegalEdge { from: NodeId(0), to: NodeId(1) })));
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let nodes = vec![node(0, NodeKind::Parameter, &[0], vec![0.2, 0.9])];
        match validate_network(&nodes) {
            Err(BayesError::CycleDetected(cycle)) => assert_eq!(cycle, vec![NodeId(0)]),
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_entries_are_malformed() {
        let nodes =
            vec![node(0, NodeKind::Parameter, &[], vec![0.5]), node(1, NodeKind::Observable, &[0], vec![0.2, 1.5])];
        assert!(matches!(validate_network(&nodes), Err(BayesError::MalformedCpt { node: NodeId(1), row: 1 })));
    }

    #[test]
    fn descendants_follow_paths() {
        let net = BayesianNetwork::new(vec![
            node(0, NodeKind::Parameter, &[], vec![0.5]),
            node(1, NodeKind::Parameter, &[0], vec![0.1, 0.9]),
            node(2, NodeKind::Observable, &[1], vec![0.1, 0.9]),
        ])
        .unwrap();
        let d: Vec<_> = net.descendants(NodeId(0)).unwrap().into_iter().collect();
        assert_eq!(d, vec![NodeId(1), NodeId(2)]);
        assert!(net.descendants(NodeId(2)).unwrap().is_empty());
        assert!(matches!(net.descendants(NodeId(7)), Err(BayesError::UnknownNode(_))));
    }

    #[test]
    fn row_index_uses_last_parent_as_lsb() {
        assert_eq!(Cpt::row_index(&[true, false]), 2);
        assert_eq!(Cpt::row_index(&[false, true]), 1);
        assert_eq!(Cpt::row_index(&[]), 0);
    }

    #[test]
    fn json_round_trip() {
        let net = BayesianNetwork::new(vec![
            node(0, NodeKind::Parameter, &[], vec![0.8]),
            node(1, NodeKind::Observable, &[0], vec![0.2, 0.9]),
        ])
        .unwrap();
        let back = BayesianNetwork::from_json(&net.to_json()).unwrap();
        assert_eq!(net, back);
    }
}
