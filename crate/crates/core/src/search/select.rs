use super::{LookupTable, Rule, SearchConfig, SearchError, TableEntry};
use crate::domain::{Action, Money, Problem, StepOutcome, SystemState, Turn};

/// Source of optional state-value priors for the first UCB term.
pub trait PriorModel {
    fn prior(&mut self, problem: &Problem, state: &SystemState) -> Result<Option<Money>, SearchError>;

    /// Called once per backed-up sample tree, at the tree boundary.
    fn observe_tree(
        &mut self,
        _problem: &Problem,
        _tree: &crate::domain::StrategyTree,
        _table: &LookupTable,
    ) -> Result<(), SearchError> {
        Ok(())
    }
}

/// Plain UCBRB1: no prior ever.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoPrior;

impl PriorModel for NoPrior {
    fn prior(&mut self, _: &Problem, _: &SystemState) -> Result<Option<Money>, SearchError> {
        Ok(None)
    }
}

/// Score of a successor state under `rule`.
///
/// Terminal states score their recorded value (or `unknown_value`) over `d7`
/// with no exploration or penalty. Otherwise the UCBRB score is
/// `first/d7 + d6 ln(n_parent + 1)/(n_k + 1) - d8 floor(m/d9)` where `first`
/// is the larger of `prior` and the recorded best value.
pub fn ucb_state(
    entry: Option<&TableEntry>,
    terminal: bool,
    n_parent: u64,
    m: usize,
    config: &SearchConfig,
    rule: Rule,
    prior: Option<Money>,
) -> f64 {
    let best = entry.and_then(|e| e.best);
    if terminal {
        return best.unwrap_or(config.unknown_value) / config.d7;
    }
    let n_k = entry.map_or(0, |e| e.visits) as f64;
    let ln_parent = ((n_parent + 1) as f64).ln();
    let score = match rule {
        Rule::Ucbrb => {
            let first = match (prior, best) {
                (Some(p), Some(b)) => p.max(b),
                (Some(p), None) => p,
                (None, Some(b)) => b,
                (None, None) => config.unknown_value,
            };
            first / config.d7 + config.d6 * ln_parent / (n_k + 1.0)
        }
        Rule::Uct => {
            let mean = entry.and_then(TableEntry::mean).unwrap_or(config.unknown_value);
            mean / config.d7 + config.d1 * (2.0 * ln_parent / (n_k + 1.0)).sqrt()
        }
        Rule::SpMcts => {
            let (mean, spread) = match entry.filter(|e| e.visits > 0) {
                Some(e) => {
                    let mean = e.sum / n_k;
                    (mean, e.sum_sq - n_k * mean * mean)
                }
                None => (config.unknown_value, 0.0),
            };
            let deviation = ((spread + config.d3) / (n_k + 1.0)).max(0.0).sqrt();
            mean / config.d7 + config.d2 * (2.0 * ln_parent / (n_k + 1.0)).sqrt() + deviation / config.d7
        }
    };
    score - config.penalty(m)
}

/// Chooses the action at non-terminal `state`, the `m`-th expansion of its tree.
///
/// Ties go to the first action in feasible order (activities by id, NA last).
pub fn select_action(
    problem: &Problem,
    state: &SystemState,
    m: usize,
    table: &LookupTable,
    config: &SearchConfig,
    rule: Rule,
    prior: &mut dyn PriorModel,
) -> Result<Action, SearchError> {
    let actions = problem.feasible_actions(state)?;
    let n_parent = table.visits(state);
    let mut best = (Action::Na, f64::NEG_INFINITY);
    for action in actions {
        let mut score = -problem.activity_cost(action) / config.d7;
        for succ in problem.transition(state, action)? {
            let terminal = problem.is_terminal(&succ.state)?.is_some();
            let p = if terminal { None } else { prior.prior(problem, &succ.state)? };
            let ucb = ucb_state(table.get(&succ.state), terminal, n_parent, m, config, rule, p);
            if succ.outcome == StepOutcome::Fail {
                let weight = if config.literal_failure_cost { 1.0 } else { succ.probability };
                score -= weight * problem.failure_cost(action) / config.d7;
            }
            score += succ.probability * ucb;
        }
        if score > best.1 {
            best = (action, score);
        }
    }
    debug_assert!(state.turn() != Turn::Stopped);
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn entry(best: f64, visits: u64) -> TableEntry {
        TableEntry { best: Some(best), visits, sum: best * visits as f64, sum_sq: best * best * visits as f64 }
    }

    #[test]
    fn fresh_entry_scores_zero() {
        let cfg = SearchConfig::default();
        assert_eq!(ucb_state(None, false, 0, 0, &cfg, Rule::Ucbrb, None), 0.0);
    }

    #[test]
    fn hand_evaluated_ucbrb_score() {
        let cfg = SearchConfig::default();
        let e = entry(7780.78, 99);
        let score = ucb_state(Some(&e), false, 999, 120, &cfg, Rule::Ucbrb, None);
        assert_abs_diff_eq!(score, 7780.78 / 20000.0 + 0.5 * 1000f64.ln() / 100.0 - 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(score, -1.576422, epsilon = 1e-6);
    }

    #[test]
    fn terminal_score_ignores_counts() {
        let cfg = SearchConfig::default();
        for (visits, parent, m) in [(1, 0, 0), (50, 1000, 400)] {
            let e = entry(19000.0, visits);
            assert_abs_diff_eq!(ucb_state(Some(&e), true, parent, m, &cfg, Rule::Ucbrb, None), 0.95);
        }
    }

    #[test]
    fn prior_lifts_first_term() {
        let cfg = SearchConfig::default();
        let e = entry(2000.0, 3);
        let without = ucb_state(Some(&e), false, 10, 0, &cfg, Rule::Ucbrb, None);
        let with = ucb_state(Some(&e), false, 10, 0, &cfg, Rule::Ucbrb, Some(6000.0));
        let lower = ucb_state(Some(&e), false, 10, 0, &cfg, Rule::Ucbrb, Some(1000.0));
        assert_abs_diff_eq!(with - without, 0.2, epsilon = 1e-12);
        assert_eq!(lower, without);
    }

    #[test]
    fn uct_uses_mean() {
        let cfg = SearchConfig::default();
        let e = TableEntry { best: Some(9000.0), visits: 2, sum: 10000.0, sum_sq: 0.0 };
        let s = ucb_state(Some(&e), false, 3, 0, &cfg, Rule::Uct, None);
        assert_abs_diff_eq!(s, 0.25 + 0.5 * (2.0 * 4f64.ln() / 3.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn sp_mcts_adds_deviation() {
        let cfg = SearchConfig::default();
        let e = TableEntry { best: Some(4000.0), visits: 2, sum: 6000.0, sum_sq: 2000f64.powi(2) + 4000f64.powi(2) };
        let uct = ucb_state(Some(&e), false, 3, 0, &cfg, Rule::Uct, None);
        let sp = ucb_state(Some(&e), false, 3, 0, &cfg, Rule::SpMcts, None);
        let spread = 2000f64.powi(2) + 4000f64.powi(2) - 2.0 * 3000f64.powi(2);
        assert_abs_diff_eq!(sp - uct, ((spread + 10000.0) / 3.0).sqrt() / 20000.0, epsilon = 1e-12);
    }
}
