use std::collections::VecDeque;

use indexmap::IndexMap;
use rand::seq::IndexedRandom;
use rand::Rng;

use super::{select_action, LookupTable, PriorModel, Rule, SearchConfig, SearchError};
use crate::domain::{Action, Money, Problem, StrategyTree, SystemState};

/// Expands every tip breadth-first, choosing each action by `rule`.
///
/// The expansion index `m` counts expansions within this tree.
pub fn build_sample_tree(
    problem: &Problem,
    root: SystemState,
    table: &LookupTable,
    config: &SearchConfig,
    rule: Rule,
    prior: &mut dyn PriorModel,
) -> Result<StrategyTree, SearchError> {
    let max_depth = problem.scenario().max_depth;
    let mut tree = StrategyTree::new(root, problem)?;
    let mut tips: VecDeque<usize> = tree.tips().collect();
    let mut m = 0;
    while let Some(tip) = tips.pop_front() {
        let node = tree.node(tip);
        let action = if max_depth.is_some_and(|d| node.depth >= d) {
            Action::Na
        } else {
            select_action(problem, &node.state, m, table, config, rule, prior)?
        };
        tips.extend(tree.expand(tip, action, problem, m)?);
        m += 1;
        if tree.len() > config.max_nodes {
            return Err(SearchError::NodeBudgetExceeded { cap: config.max_nodes });
        }
    }
    Ok(tree)
}

/// Random expansion with uniformly chosen feasible actions.
///
/// Returns `None` as soon as the tree reaches `node_limit` nodes.
pub fn build_random_tree<R: Rng + ?Sized>(
    problem: &Problem,
    root: SystemState,
    node_limit: usize,
    rng: &mut R,
) -> Result<Option<StrategyTree>, SearchError> {
    let max_depth = problem.scenario().max_depth;
    let mut tree = StrategyTree::new(root, problem)?;
    let mut tips: VecDeque<usize> = tree.tips().collect();
    let mut m = 0;
    while let Some(tip) = tips.pop_front() {
        let node = tree.node(tip);
        let action = if max_depth.is_some_and(|d| node.depth >= d) {
            Action::Na
        } else {
            *problem.feasible_actions(&node.state)?.choose(rng).expect("NA is always feasible")
        };
        tips.extend(tree.expand(tip, action, problem, m)?);
        m += 1;
        if tree.len() >= node_limit {
            return Ok(None);
        }
    }
    Ok(Some(tree))
}

/// Computes node values and records every distinct state of the tree in `table`.
///
/// A state that occurs several times in one tree gets one visit, credited with
/// the largest value among its occurrences. Returns the root value.
pub fn backup_and_update(
    problem: &Problem,
    tree: &mut StrategyTree,
    table: &mut LookupTable,
) -> Result<Money, SearchError> {
    let root = tree.backup(problem)?;
    let mut per_state: IndexMap<SystemState, Money> = IndexMap::new();
    for node in tree.nodes() {
        let v = node.value.expect("backed up");
        per_state.entry(node.state).and_modify(|u| *u = u.max(v)).or_insert(v);
    }
    for (state, v) in per_state {
        table.observe(state, v);
    }
    Ok(root)
}
