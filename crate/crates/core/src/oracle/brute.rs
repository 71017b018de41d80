use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use super::OracleError;
use crate::domain::{Action, Money, Problem, StepOutcome, StrategyTree, SystemState};

pub const MAX_BRUTE_DEPTH: usize = 8;
const MAX_STRATEGIES: usize = 2_000_000;

/// One candidate strategy below a state.
#[derive(Debug)]
enum Plan {
    Stop,
    Decide { action: Action, children: Vec<Rc<Plan>> },
}

struct Enumerator<'a> {
    problem: &'a Problem,
    cap: usize,
    memo: HashMap<(SystemState, usize), Rc<Vec<Rc<Plan>>>>,
}

impl Enumerator<'_> {
    /// Every complete strategy rooted at `state` at `depth`. Past the depth
    /// cap only NA is allowed.
    fn plans(&mut self, state: SystemState, depth: usize) -> Result<Rc<Vec<Rc<Plan>>>, OracleError> {
        if let Some(p) = self.memo.get(&(state, depth)) {
            return Ok(p.clone());
        }
        let mut out = Vec::new();
        if self.problem.is_terminal(&state)?.is_some() {
            out.push(Rc::new(Plan::Stop));
        } else {
            let actions = if depth >= self.cap { vec![Action::Na] } else { self.problem.feasible_actions(&state)? };
            for action in actions {
                let succs = self.problem.transition(&state, action)?;
                let child_sets: Vec<Rc<Vec<Rc<Plan>>>> =
                    succs.iter().map(|s| self.plans(s.state, depth + 1)).collect::<Result<_, _>>()?;
                let combos: usize = child_sets.iter().map(|c| c.len()).product();
                if out.len() + combos > MAX_STRATEGIES {
                    return Err(OracleError::InstanceTooLarge(format!("more than {MAX_STRATEGIES} strategies")));
                }
                let mut idx = vec![0usize; child_sets.len()];
                'combos: loop {
                    let children = idx.iter().zip(&child_sets).map(|(&i, set)| set[i].clone()).collect();
                    out.push(Rc::new(Plan::Decide { action, children }));
                    for pos in (0..idx.len()).rev() {
                        idx[pos] += 1;
                        if idx[pos] < child_sets[pos].len() {
                            continue 'combos;
                        }
                        idx[pos] = 0;
                    }
                    break;
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert((state, depth), out.clone());
        Ok(out)
    }
}

/// Expected value by explicit path enumeration: the sum over root-to-leaf
/// paths of path probability times (terminal revenue minus the costs charged
/// along the path).
fn path_sum(problem: &Problem, plan: &Plan, root: SystemState) -> Result<Money, OracleError> {
    let mut total = 0.0;
    let mut stack: Vec<(&Plan, SystemState, f64, Money)> = vec![(plan, root, 1.0, 0.0)];
    while let Some((plan, state, p, cost)) = stack.pop() {
        match plan {
            Plan::Stop => total += p * (problem.revenue(&state)? - cost),
            Plan::Decide { action, children } => {
                for (succ, child) in problem.transition(&state, *action)?.into_iter().zip(children) {
                    let step = problem.activity_cost(*action)
                        + if succ.outcome == StepOutcome::Fail { problem.failure_cost(*action) } else { 0.0 };
                    stack.push((child, succ.state, p * succ.probability, cost + step));
                }
            }
        }
    }
    Ok(total)
}

fn to_tree(problem: &Problem, plan: &Rc<Plan>) -> Result<StrategyTree, OracleError> {
    let mut tree = StrategyTree::new(problem.initial_state(), problem)?;
    let mut queue: VecDeque<(usize, Rc<Plan>)> = VecDeque::from([(0, plan.clone())]);
    let mut m = 0;
    while let Some((node, plan)) = queue.pop_front() {
        if let Plan::Decide { action, children } = plan.as_ref() {
            tree.expand(node, *action, problem, m)?;
            m += 1;
            let kids: Vec<usize> = tree.node(node).branches().iter().map(|b| b.child).collect();
            for (child, sub) in kids.into_iter().zip(children) {
                if matches!(sub.as_ref(), Plan::Decide { .. }) {
                    queue.push_back((child, sub.clone()));
                }
            }
        }
    }
    tree.backup(problem)?;
    Ok(tree)
}

/// Exhaustive search over all complete strategies of depth at most `depth_cap`
/// for instances with at most two VAs and one CA. Ties keep the earliest
/// strategy in enumeration order, i.e. lower activity ids first, NA last.
pub fn brute_force_enumerate(problem: &Problem, depth_cap: usize) -> Result<(StrategyTree, Money), OracleError> {
    if problem.n_va() > 2 || problem.n_ca() > 1 || depth_cap > MAX_BRUTE_DEPTH {
        return Err(OracleError::InstanceTooLarge(format!(
            "{} VAs, {} CAs, depth {depth_cap}",
            problem.n_va(),
            problem.n_ca()
        )));
    }
    let root = problem.initial_state();
    let mut e = Enumerator { problem, cap: depth_cap, memo: HashMap::new() };
    let plans = e.plans(root, 0)?;
    let mut best: Option<(Money, &Rc<Plan>)> = None;
    for plan in plans.iter() {
        let v = path_sum(problem, plan, root)?;
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, plan));
        }
    }
    let (value, plan) = best.expect("at least one strategy");
    Ok((to_tree(problem, plan)?, value))
}

/// Number of complete strategies of depth at most `depth_cap`.
pub fn count_strategies(problem: &Problem, depth_cap: usize) -> Result<usize, OracleError> {
    let mut e = Enumerator { problem, cap: depth_cap, memo: HashMap::new() };
    Ok(e.plans(problem.initial_state(), 0)?.len())
}
