use std::collections::VecDeque;
use std::time::Instant;

use indexmap::IndexMap;

use super::OracleError;
use crate::domain::{Action, Money, Problem, StrategyTree, SystemState, Turn};

pub const DEFAULT_STATE_CAP: usize = 1 << 21;

/// Optimal value and action of every reachable state. Terminal states carry no action.
///
/// Stopping by NA on a VA turn is valued directly as the stop revenue, so the
/// stopped marker states are not stored.
#[derive(Debug, Clone)]
pub struct StateValueTable {
    entries: IndexMap<SystemState, (Money, Option<Action>)>,
    pub elapsed: f64,
}

impl StateValueTable {
    pub fn value(&self, state: &SystemState) -> Option<Money> {
        self.entries.get(state).map(|e| e.0)
    }

    /// Value of a state, including stopped marker states.
    pub fn value_of(&self, problem: &Problem, state: &SystemState) -> Result<Option<Money>, OracleError> {
        if state.turn() == Turn::Stopped {
            return Ok(Some(problem.revenue(state)?));
        }
        Ok(self.value(state))
    }

    pub fn action(&self, state: &SystemState) -> Option<Action> {
        self.entries.get(state).and_then(|e| e.1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SystemState, &(Money, Option<Action>))> {
        self.entries.iter()
    }

    /// The optimal strategy from the initial state, following the stored actions.
    pub fn extract_strategy(&self, problem: &Problem) -> Result<StrategyTree, OracleError> {
        let mut tree = StrategyTree::new(problem.initial_state(), problem)?;
        let mut tips: VecDeque<usize> = tree.tips().collect();
        let mut m = 0;
        while let Some(tip) = tips.pop_front() {
            let state = tree.node(tip).state;
            let action = self.action(&state).ok_or(OracleError::MissingState)?;
            debug_assert!(state.turn() != Turn::Stopped);
            tips.extend(tree.expand(tip, action, problem, m)?);
            m += 1;
        }
        tree.backup(problem)?;
        Ok(tree)
    }
}

/// Rank that strictly increases along every transition: applied CAs, then
/// executed VAs, then turn (CA turn, VA turn, stopped).
fn rank(state: &SystemState) -> (u32, u32, u8) {
    let turn = match state.turn() {
        Turn::Ca => 0,
        Turn::Va => 1,
        Turn::Stopped => 2,
    };
    (state.ca_count(), state.va_count(), turn)
}

/// Exact optimal values over all states reachable from the initial state.
///
/// The state graph is acyclic (see [`rank`]), so one sweep in decreasing rank
/// order evaluates every successor before its predecessors.
pub fn backward_induction(problem: &Problem, cap: usize) -> Result<StateValueTable, OracleError> {
    let start = Instant::now();
    let mut reachable: IndexMap<SystemState, bool> = IndexMap::new();
    let mut queue = VecDeque::new();
    let root = problem.initial_state();
    reachable.insert(root, false);
    queue.push_back(root);
    while let Some(state) = queue.pop_front() {
        let terminal = problem.is_terminal(&state)?.is_some();
        reachable.insert(state, terminal);
        if terminal {
            continue;
        }
        for action in problem.feasible_actions(&state)? {
            for succ in problem.transition(&state, action)? {
                if succ.state.turn() == Turn::Stopped {
                    continue;
                }
                if !reachable.contains_key(&succ.state) {
                    if reachable.len() >= cap {
                        return Err(OracleError::StateSpaceTooLarge { cap });
                    }
                    reachable.insert(succ.state, false);
                    queue.push_back(succ.state);
                }
            }
        }
    }

    let mut order: Vec<(SystemState, bool)> = reachable.into_iter().collect();
    order.sort_by(|a, b| rank(&b.0).cmp(&rank(&a.0)).then(a.0.cmp(&b.0)));
    let mut entries: IndexMap<SystemState, (Money, Option<Action>)> = IndexMap::with_capacity(order.len());
    for (state, terminal) in order {
        if terminal {
            entries.insert(state, (problem.revenue(&state)?, None));
            continue;
        }
        let mut best: Option<(Money, Action)> = None;
        for action in problem.feasible_actions(&state)? {
            if action == Action::Na && state.turn() == Turn::Va {
                let v = problem.revenue(&state)?;
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, action));
                }
                continue;
            }
            let mut v = -problem.activity_cost(action);
            for succ in problem.transition(&state, action)? {
                let next = entries.get(&succ.state).ok_or(OracleError::MissingState)?.0;
                let fail =
                    if succ.outcome == crate::domain::StepOutcome::Fail { problem.failure_cost(action) } else { 0.0 };
                v += succ.probability * (next - fail);
            }
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, action));
            }
        }
        let (v, a) = best.expect("NA is always feasible");
        entries.insert(state, (v, Some(a)));
    }
    Ok(StateValueTable { entries, elapsed: start.elapsed().as_secs_f64() })
}
