use super::{Action, DomainError, Money, Problem, StepOutcome, SystemState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStep {
    pub state: SystemState,
    pub action: Action,
    pub outcome: StepOutcome,
}

/// One root-to-terminal outcome sequence of a strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationPath {
    pub steps: Vec<PathStep>,
    pub terminal: SystemState,
}

impl VerificationPath {
    fn next_state(&self, i: usize) -> SystemState {
        self.steps.get(i + 1).map_or(self.terminal, |s| s.state)
    }
}

/// Terminal revenue minus every activity and failure cost charged along the path.
///
/// A VA executed again after an invalidating correction is charged each time.
pub fn path_value(path: &VerificationPath, problem: &Problem) -> Result<Money, DomainError> {
    if problem.is_terminal(&path.terminal)?.is_none() {
        return Err(DomainError::NonTerminalPath);
    }
    let costs: Money = path.steps.iter().map(|s| problem.step_cost(s.action, s.outcome)).sum();
    Ok(problem.revenue(&path.terminal)? - costs)
}

/// Product of the transition probabilities along the path, recomputed from the model.
pub fn path_probability(path: &VerificationPath, problem: &Problem) -> Result<f64, DomainError> {
    let mut p = 1.0;
    for (i, step) in path.steps.iter().enumerate() {
        let next = path.next_state(i);
        let succ = problem
            .transition(&step.state, step.action)?
            .into_iter()
            .find(|s| s.outcome == step.outcome && s.state == next)
            .ok_or(DomainError::BrokenPath(i))?;
        p *= succ.probability;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{BayesianNetwork, Cpt, Likelihood, Node, NodeId, NodeKind};
    use crate::domain::{CorrectionActivity, Scenario, Target, Turn, VerificationActivity};
    use approx::assert_abs_diff_eq;

    fn single(prior: f64) -> Problem {
        let net = BayesianNetwork::new(vec![
            Node { id: NodeId(0), name: "theta".into(), kind: NodeKind::Parameter, cpt: Cpt::prior(prior) },
            Node {
                id: NodeId(1),
                name: "mu".into(),
                kind: NodeKind::Observable,
                cpt: Cpt::new(vec![NodeId(0)], vec![0.2, 0.9]),
            },
        ])
        .unwrap();
        Problem::new(
            net,
            Scenario {
                name: "single".into(),
                verification_activities: vec![VerificationActivity {
                    id: 12,
                    name: "mu_12".into(),
                    node: NodeId(1),
                    activity_cost: 500.0,
                    failure_cost: 8000.0,
                }],
                correction_activities: vec![CorrectionActivity {
                    id: 1,
                    name: "phi_1".into(),
                    target: NodeId(0),
                    activity_cost: 8500.0,
                    effect: Likelihood::new(0.9, 0.1).unwrap(),
                }],
                targets: vec![Target { parameter: NodeId(0), revenue: 20000.0, threshold: 0.9 }],
                max_depth: None,
            },
        )
        .unwrap()
    }

    #[test]
    fn empty_path_is_pure_revenue() {
        let p = single(0.95);
        let path = VerificationPath { steps: vec![], terminal: p.initial_state() };
        assert_abs_diff_eq!(path_value(&path, &p).unwrap(), 19000.0, epsilon = 1e-9);
        assert_eq!(path_probability(&path, &p).unwrap(), 1.0);
    }

    #[test]
    fn failed_va_then_stop_charges_costs() {
        let p = single(0.5);
        let s0 = p.initial_state();
        let s1 = p.transition(&s0, Action::Va(0)).unwrap()[1].state;
        let s2 = s1.with_turn(Turn::Va);
        let stop = s2.with_turn(Turn::Stopped);
        let path = VerificationPath {
            steps: vec![
                PathStep { state: s0, action: Action::Va(0), outcome: StepOutcome::Fail },
                PathStep { state: s1, action: Action::Na, outcome: StepOutcome::Done },
                PathStep { state: s2, action: Action::Na, outcome: StepOutcome::Done },
            ],
            terminal: stop,
        };
        // mu_12 row of the cost table: 500 activity + 8000 on failure.
        assert_abs_diff_eq!(path_value(&path, &p).unwrap(), -8500.0, epsilon = 1e-9);
        assert_abs_diff_eq!(path_probability(&path, &p).unwrap(), 1.0 - (0.5 * 0.9 + 0.5 * 0.2), epsilon = 1e-12);
    }

    #[test]
    fn non_terminal_path_rejected() {
        let p = single(0.5);
        let path = VerificationPath { steps: vec![], terminal: p.initial_state() };
        assert!(matches!(path_value(&path, &p), Err(DomainError::NonTerminalPath)));
    }
}
