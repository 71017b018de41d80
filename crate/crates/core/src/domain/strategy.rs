//! AND/OR strategy trees (joint verification-correction strategies).
//!
//! Nodes live in an arena and children are always appended after their parent,
//! so a reverse index sweep visits children before parents.

use super::{
    path_value, Action, DomainError, Money, PathStep, Problem, StepOutcome, SystemState, TerminalReason,
    VerificationPath,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub outcome: StepOutcome,
    pub probability: f64,
    pub child: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNodeKind {
    /// Non-terminal node not yet expanded.
    Tip,
    Leaf(TerminalReason),
    Decision {
        action: Action,
        branches: Vec<Branch>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub state: SystemState,
    /// Number of decisions between the root and this node.
    pub depth: usize,
    /// Order in which the node was expanded within its tree.
    pub expansion_index: Option<usize>,
    pub value: Option<Money>,
    pub kind: TreeNodeKind,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, TreeNodeKind::Leaf(_))
    }

    pub fn action(&self) -> Option<Action> {
        match self.kind {
            TreeNodeKind::Decision { action, .. } => Some(action),
            _ => None,
        }
    }

    pub fn branches(&self) -> &[Branch] {
        match &self.kind {
            TreeNodeKind::Decision { branches, .. } => branches,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyTree {
    nodes: Vec<TreeNode>,
}

impl StrategyTree {
    pub fn new(root: SystemState, problem: &Problem) -> Result<Self, DomainError> {
        let kind = match problem.is_terminal(&root)? {
            Some(reason) => TreeNodeKind::Leaf(reason),
            None => TreeNodeKind::Tip,
        };
        Ok(StrategyTree { nodes: vec![TreeNode { state: root, depth: 0, expansion_index: None, value: None, kind }] })
    }

    /// Assembles a tree from raw nodes; used by importers.
    pub fn from_nodes(nodes: Vec<TreeNode>) -> Result<Self, DomainError> {
        if nodes.is_empty() {
            return Err(DomainError::IncompleteTree);
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.branches().iter().any(|b| b.child <= i || b.child >= nodes.len()) {
                return Err(DomainError::MalformedTree(i));
            }
        }
        Ok(StrategyTree { nodes })
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn root_action(&self) -> Option<Action> {
        self.root().action()
    }

    pub fn node(&self, i: usize) -> &TreeNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn tips(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().enumerate().filter(|(_, n)| matches!(n.kind, TreeNodeKind::Tip)).map(|(i, _)| i)
    }

    pub fn is_complete(&self) -> bool {
        self.tips().next().is_none()
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Chooses `action` at tip `node`, attaching every outcome branch.
    ///
    /// Returns the indices of the new non-terminal children.
    pub fn expand(
        &mut self,
        node: usize,
        action: Action,
        problem: &Problem,
        expansion_index: usize,
    ) -> Result<Vec<usize>, DomainError> {
        if !matches!(self.nodes[node].kind, TreeNodeKind::Tip) {
            return Err(DomainError::NotATip(node));
        }
        let state = self.nodes[node].state;
        let depth = self.nodes[node].depth + 1;
        let mut branches = Vec::with_capacity(2);
        let mut tips = Vec::new();
        for succ in problem.transition(&state, action)? {
            let kind = match problem.is_terminal(&succ.state)? {
                Some(reason) => TreeNodeKind::Leaf(reason),
                None => TreeNodeKind::Tip,
            };
            let child = self.nodes.len();
            if matches!(kind, TreeNodeKind::Tip) {
                tips.push(child);
            }
            self.nodes.push(TreeNode { state: succ.state, depth, expansion_index: None, value: None, kind });
            branches.push(Branch { outcome: succ.outcome, probability: succ.probability, child });
        }
        let n = &mut self.nodes[node];
        n.expansion_index = Some(expansion_index);
        n.kind = TreeNodeKind::Decision { action, branches };
        Ok(tips)
    }

    /// Backward value update from the leaves to the root.
    ///
    /// Leaves take their terminal revenue. A VA node takes
    /// `-C(mu) - P(Fail) C(Fail) + sum_a P(a) U(child_a)`, any other decision
    /// `-C + U(child)`. Returns the root value.
    pub fn backup(&mut self, problem: &Problem) -> Result<Money, DomainError> {
        for i in (0..self.nodes.len()).rev() {
            let value = match &self.nodes[i].kind {
                TreeNodeKind::Tip => return Err(DomainError::IncompleteTree),
                TreeNodeKind::Leaf(_) => problem.revenue(&self.nodes[i].state)?,
                TreeNodeKind::Decision { action, branches } => {
                    let mut v = -problem.activity_cost(*action);
                    for b in branches {
                        if b.outcome == StepOutcome::Fail {
                            v -= b.probability * problem.failure_cost(*action);
                        }
                        v += b.probability * self.nodes[b.child].value.expect("children valued first");
                    }
                    v
                }
            };
            self.nodes[i].value = Some(value);
        }
        Ok(self.nodes[0].value.expect("root valued"))
    }

    /// Every verification path with the product of its branch probabilities.
    pub fn paths(&self) -> Result<Vec<(VerificationPath, f64)>, DomainError> {
        let mut out = Vec::new();
        let mut stack: Vec<(usize, Vec<PathStep>, f64)> = vec![(0, Vec::new(), 1.0)];
        while let Some((i, steps, p)) = stack.pop() {
            let node = &self.nodes[i];
            match &node.kind {
                TreeNodeKind::Tip => return Err(DomainError::IncompleteTree),
                TreeNodeKind::Leaf(_) => out.push((VerificationPath { steps, terminal: node.state }, p)),
                TreeNodeKind::Decision { action, branches } => {
                    for b in branches.iter().rev() {
                        let mut next = steps.clone();
                        next.push(PathStep { state: node.state, action: *action, outcome: b.outcome });
                        stack.push((b.child, next, p * b.probability));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Expected path value `sum_w P(Z_w) U(Z_w)` by explicit path enumeration.
    pub fn strategy_value(&self, problem: &Problem) -> Result<Money, DomainError> {
        self.paths()?.iter().map(|(path, p)| path_value(path, problem).map(|u| p * u)).sum()
    }
}
