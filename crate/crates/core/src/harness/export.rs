//! Strategy serialization: nested JSON (round-trips) and Graphviz DOT.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::domain::{
    Action, Branch, DomainError, Money, Problem, StepOutcome, StrategyTree, SystemState, TerminalReason, TreeNode,
    TreeNodeKind, Turn,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Dot,
}

impl std::str::FromStr for ExportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "dot" => Ok(ExportFormat::Dot),
            _ => Err(HarnessError::Invalid(format!("unknown export format `{s}`"))),
        }
    }
}

/// One node of the nested JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyNode {
    /// Encoded state, see [`SystemState::encode`].
    pub state: String,
    pub value: Money,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<StrategyBranch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyBranch {
    pub outcome: StepOutcome,
    pub probability: f64,
    pub child: StrategyNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyDocument {
    pub scenario: String,
    pub expected_value: Money,
    pub root: StrategyNode,
}

/// Serializes a complete tree. Output depends only on the tree, so identical
/// trees produce identical bytes.
pub fn export_strategy(problem: &Problem, tree: &StrategyTree, format: ExportFormat) -> Result<String, HarnessError> {
    if !tree.is_complete() {
        return Err(DomainError::IncompleteTree.into());
    }
    let mut tree = tree.clone();
    tree.backup(problem)?;
    match format {
        ExportFormat::Json => {
            let doc = StrategyDocument {
                scenario: problem.scenario().name.clone(),
                expected_value: tree.strategy_value(problem)?,
                root: to_json_node(problem, &tree, 0),
            };
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            Ok(text)
        }
        ExportFormat::Dot => Ok(to_dot(problem, &tree)),
    }
}

fn terminal_name(reason: TerminalReason) -> &'static str {
    match reason {
        TerminalReason::ThresholdMet => "threshold_met",
        TerminalReason::NaSelected => "na_selected",
    }
}

fn to_json_node(problem: &Problem, tree: &StrategyTree, i: usize) -> StrategyNode {
    let node = tree.node(i);
    let (action, terminal) = match node.kind {
        TreeNodeKind::Decision { action, .. } => (Some(problem.action_label(action)), None),
        TreeNodeKind::Leaf(reason) => (None, Some(terminal_name(reason).to_string())),
        TreeNodeKind::Tip => unreachable!("tree is complete"),
    };
    StrategyNode {
        state: problem.encode_state(&node.state),
        value: node.value.expect("tree is backed up"),
        action,
        terminal,
        branches: node
            .branches()
            .iter()
            .map(|b| StrategyBranch {
                outcome: b.outcome,
                probability: b.probability,
                child: to_json_node(problem, tree, b.child),
            })
            .collect(),
    }
}

/// Rebuilds a tree from [`export_strategy`]'s JSON output. Node values are
/// recomputed from the problem.
pub fn import_strategy(problem: &Problem, text: &str) -> Result<StrategyTree, HarnessError> {
    let doc: StrategyDocument = serde_json::from_str(text)?;
    let mut nodes = Vec::new();
    push_node(problem, &doc.root, 0, &mut nodes)?;
    let mut tree = StrategyTree::from_nodes(nodes)?;
    tree.backup(problem)?;
    Ok(tree)
}

fn push_node(
    problem: &Problem,
    src: &StrategyNode,
    depth: usize,
    nodes: &mut Vec<TreeNode>,
) -> Result<usize, HarnessError> {
    let state = SystemState::decode(&src.state)
        .ok_or_else(|| HarnessError::Invalid(format!("bad state encoding `{}`", src.state)))?;
    let index = nodes.len();
    let kind = match (&src.action, &src.terminal) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(HarnessError::Invalid(format!("node {index} needs exactly one of action or terminal")))
        }
        (None, Some(_)) => {
            let reason = problem.is_terminal(&state)?.ok_or(DomainError::NonTerminalPath)?;
            TreeNodeKind::Leaf(reason)
        }
        (Some(label), None) => {
            let action = problem
                .parse_action(label)
                .ok_or_else(|| HarnessError::Invalid(format!("unknown action `{label}`")))?;
            TreeNodeKind::Decision { action, branches: Vec::new() }
        }
    };
    nodes.push(TreeNode { state, depth, expansion_index: None, value: None, kind });
    let mut branches = Vec::with_capacity(src.branches.len());
    for b in &src.branches {
        let child = push_node(problem, &b.child, depth + 1, nodes)?;
        branches.push(Branch { outcome: b.outcome, probability: b.probability, child });
    }
    if let TreeNodeKind::Decision { branches: slot, .. } = &mut nodes[index].kind {
        *slot = branches;
    } else if !branches.is_empty() {
        return Err(HarnessError::Invalid(format!("leaf {index} has branches")));
    }
    Ok(index)
}

/// Skips NA on a CA turn. Returns the node to draw and whether it is a stop
/// leaf (a terminal node or NA on a VA turn).
fn resolve(tree: &StrategyTree, mut i: usize) -> (usize, bool) {
    loop {
        let node = tree.node(i);
        match node.kind {
            TreeNodeKind::Leaf(_) => return (i, true),
            TreeNodeKind::Decision { action: Action::Na, ref branches } => {
                if node.state.turn() == Turn::Ca {
                    i = branches[0].child;
                } else {
                    return (i, true);
                }
            }
            _ => return (i, false),
        }
    }
}

fn to_dot(problem: &Problem, tree: &StrategyTree) -> String {
    let mut out = String::new();
    out.push_str("digraph strategy {\n");
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    out.push_str("  start [label=\"start\", shape=plaintext];\n");
    let mut next_id = 0usize;
    let root = render(problem, tree, 0, &mut next_id, &mut out);
    let _ = writeln!(out, "  start -> n{root};");
    out.push_str("}\n");
    out
}

/// Emits the subtree rooted at tree node `i` in preorder and returns its DOT id.
fn render(problem: &Problem, tree: &StrategyTree, i: usize, next_id: &mut usize, out: &mut String) -> usize {
    let (i, stop) = resolve(tree, i);
    let id = *next_id;
    *next_id += 1;
    if stop {
        let _ = writeln!(out, "  n{id} [label=\"Stop\", shape=box];");
        return id;
    }
    let node = tree.node(i);
    let action = node.action().expect("decision node");
    let shape = if matches!(action, Action::Va(_)) { "ellipse" } else { "diamond" };
    let _ = writeln!(out, "  n{id} [label=\"{}\", shape={shape}];", problem.action_label(action));
    for b in node.branches() {
        let child = render(problem, tree, b.child, next_id, out);
        match b.outcome {
            StepOutcome::Pass => {
                let _ = writeln!(out, "  n{id} -> n{child} [label=\"P\"];");
            }
            StepOutcome::Fail => {
                let _ = writeln!(out, "  n{id} -> n{child} [label=\"F\"];");
            }
            StepOutcome::Done => {
                let _ = writeln!(out, "  n{id} -> n{child};");
            }
        }
    }
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_problem, Template};
    use crate::oracle::{backward_induction, DEFAULT_STATE_CAP};

    fn na_only(problem: &Problem) -> StrategyTree {
        let mut tree = StrategyTree::new(problem.initial_state(), problem).unwrap();
        tree.expand(0, Action::Na, problem, 0).unwrap();
        tree
    }

    #[test]
    fn na_only_tree_is_one_stop_leaf() {
        let p = generate_problem(Template::Tiny, 0).unwrap();
        let dot = export_strategy(&p, &na_only(&p), ExportFormat::Dot).unwrap();
        assert_eq!(dot.matches("label=\"Stop\"").count(), 1);
        assert!(dot.contains("start -> n0;"));
        assert_eq!(dot.matches("->").count(), 1);
    }

    #[test]
    fn tiny_optimum_renders_one_decision_two_leaves() {
        let p = generate_problem(Template::Tiny, 0).unwrap();
        let tree = backward_induction(&p, DEFAULT_STATE_CAP).unwrap().extract_strategy(&p).unwrap();
        let dot = export_strategy(&p, &tree, ExportFormat::Dot).unwrap();
        assert!(dot.contains("n0 [label=\"mu_1\", shape=ellipse];"));
        assert_eq!(dot.matches("label=\"Stop\"").count(), 2);
        assert!(dot.contains("n0 -> n1 [label=\"P\"];"));
        assert!(dot.contains("n0 -> n2 [label=\"F\"];"));
        assert!(!dot.contains("NA"));
    }

    #[test]
    fn json_round_trip_keeps_value() {
        let p = generate_problem(Template::Tiny, 0).unwrap();
        let tree = backward_induction(&p, DEFAULT_STATE_CAP).unwrap().extract_strategy(&p).unwrap();
        let text = export_strategy(&p, &tree, ExportFormat::Json).unwrap();
        let back = import_strategy(&p, &text).unwrap();
        assert_eq!(back.strategy_value(&p).unwrap(), tree.strategy_value(&p).unwrap());
        assert_eq!(export_strategy(&p, &back, ExportFormat::Json).unwrap(), text);
    }

    #[test]
    fn incomplete_tree_is_rejected() {
        let p = generate_problem(Template::Tiny, 0).unwrap();
        let tree = StrategyTree::new(p.initial_state(), &p).unwrap();
        assert!(matches!(
            export_strategy(&p, &tree, ExportFormat::Json),
            Err(HarnessError::Domain(DomainError::IncompleteTree))
        ));
    }
}
