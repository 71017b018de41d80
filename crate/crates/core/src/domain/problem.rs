use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::{Action, DomainError, Money, Scenario, StepOutcome, SystemState, Turn, VaStatus};
use crate::bayes::{all_marginals, BayesianNetwork, EvidenceItem, Likelihood, NodeId, Outcome};

/// Why a state ends its verification path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalReason {
    ThresholdMet,
    NaSelected,
}

/// One outcome of an action: its probability and the resulting state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Successor {
    pub outcome: StepOutcome,
    pub probability: f64,
    pub state: SystemState,
}

type BeliefKey = (u64, u64, u64);

/// A network paired with a scenario: the full decision domain.
///
/// Posterior marginals are memoized per evidence set. Every other operation is
/// a pure function of its arguments.
#[derive(Debug)]
pub struct Problem {
    network: BayesianNetwork,
    scenario: Scenario,
    /// For each CA, the mask of VAs whose observed node descends from its target.
    invalidates: Vec<u64>,
    beliefs: RwLock<HashMap<BeliefKey, Arc<[f64]>>>,
}

impl Problem {
    pub fn new(network: BayesianNetwork, scenario: Scenario) -> Result<Self, DomainError> {
        let scenario = scenario.normalized(&network)?;
        let invalidates = scenario
            .correction_activities
            .iter()
            .map(|ca| {
                let desc = network.descendants(ca.target)?;
                Ok(scenario
                    .verification_activities
                    .iter()
                    .enumerate()
                    .filter(|(_, va)| desc.contains(&va.node))
                    .fold(0u64, |m, (j, _)| m | 1 << j))
            })
            .collect::<Result<Vec<_>, DomainError>>()?;
        Ok(Problem { network, scenario, invalidates, beliefs: RwLock::new(HashMap::new()) })
    }

    pub fn network(&self) -> &BayesianNetwork {
        &self.network
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn n_va(&self) -> usize {
        self.scenario.verification_activities.len()
    }

    pub fn n_ca(&self) -> usize {
        self.scenario.correction_activities.len()
    }

    pub fn initial_state(&self) -> SystemState {
        SystemState::initial()
    }

    /// VA results invalidated by applying CA `ca`.
    pub fn invalidation_mask(&self, ca: usize) -> u64 {
        self.invalidates[ca]
    }

    /// Hard evidence for every valid VA result plus the composed CA likelihoods.
    pub fn evidence(&self, state: &SystemState) -> Vec<EvidenceItem> {
        let mut items = Vec::new();
        for (j, va) in self.scenario.verification_activities.iter().enumerate() {
            let outcome = match state.va_status(j) {
                VaStatus::None => continue,
                VaStatus::Pass => Outcome::Pass,
                VaStatus::Fail => Outcome::Fail,
            };
            items.push(EvidenceItem::Hard { node: va.node, state: outcome });
        }
        let mut soft: Vec<(NodeId, Likelihood)> = Vec::new();
        for (k, ca) in self.scenario.correction_activities.iter().enumerate() {
            if !state.ca_applied(k) {
                continue;
            }
            match soft.iter_mut().find(|(n, _)| *n == ca.target) {
                Some((_, l)) => *l = l.combine(&ca.effect).expect("positive likelihood products"),
                None => soft.push((ca.target, ca.effect)),
            }
        }
        items.extend(soft.into_iter().map(|(node, likelihood)| EvidenceItem::Virtual { node, likelihood }));
        items
    }

    /// Posterior `P(node = Pass)` of every network node under the state's evidence.
    pub fn beliefs(&self, state: &SystemState) -> Result<Arc<[f64]>, DomainError> {
        let key = state.evidence_key();
        if let Some(b) = self.beliefs.read().expect("belief cache poisoned").get(&key) {
            return Ok(Arc::clone(b));
        }
        let marginals: Arc<[f64]> = all_marginals(&self.network, &self.evidence(state))?.into();
        self.beliefs.write().expect("belief cache poisoned").insert(key, Arc::clone(&marginals));
        Ok(marginals)
    }

    pub fn confidence(&self, state: &SystemState, node: NodeId) -> Result<f64, DomainError> {
        Ok(self.beliefs(state)?[node.0])
    }

    pub fn cached_belief_count(&self) -> usize {
        self.beliefs.read().expect("belief cache poisoned").len()
    }

    /// Legal actions in a deterministic order: activities by ascending id, NA last.
    pub fn feasible_actions(&self, state: &SystemState) -> Result<Vec<Action>, DomainError> {
        if self.is_terminal(state)?.is_some() {
            return Err(DomainError::TerminalState);
        }
        let mut actions: Vec<Action> = match state.turn() {
            Turn::Va => (0..self.n_va()).filter(|&j| state.va_status(j) == VaStatus::None).map(Action::Va).collect(),
            Turn::Ca => (0..self.n_ca()).filter(|&k| !state.ca_applied(k)).map(Action::Ca).collect(),
            Turn::Stopped => unreachable!("stopped states are terminal"),
        };
        actions.push(Action::Na);
        Ok(actions)
    }

    fn is_feasible(&self, state: &SystemState, action: Action) -> bool {
        match (state.turn(), action) {
            (Turn::Stopped, _) => false,
            (_, Action::Na) => true,
            (Turn::Va, Action::Va(j)) => j < self.n_va() && state.va_status(j) == VaStatus::None,
            (Turn::Ca, Action::Ca(k)) => k < self.n_ca() && !state.ca_applied(k),
            _ => false,
        }
    }

    /// Outcomes of `action` at `state`. Zero-probability outcomes are omitted.
    pub fn transition(&self, state: &SystemState, action: Action) -> Result<Vec<Successor>, DomainError> {
        if !self.is_feasible(state, action) {
            return Err(DomainError::InfeasibleAction);
        }
        let next = match action {
            Action::Va(j) => {
                let p_pass = self.beliefs(state)?[self.scenario.verification_activities[j].node.0];
                let after = state.with_turn(Turn::Ca);
                let mut out = Vec::with_capacity(2);
                if p_pass > 0.0 {
                    out.push(Successor {
                        outcome: StepOutcome::Pass,
                        probability: p_pass,
                        state: after.with_status(j, VaStatus::Pass),
                    });
                }
                if p_pass < 1.0 {
                    out.push(Successor {
                        outcome: StepOutcome::Fail,
                        probability: 1.0 - p_pass,
                        state: after.with_status(j, VaStatus::Fail),
                    });
                }
                out
            }
            Action::Ca(k) => {
                let state = state.with_applied(k).clear_results(self.invalidates[k]).with_turn(Turn::Va);
                vec![Successor { outcome: StepOutcome::Done, probability: 1.0, state }]
            }
            Action::Na => {
                let turn = if state.turn() == Turn::Va { Turn::Stopped } else { Turn::Va };
                vec![Successor { outcome: StepOutcome::Done, probability: 1.0, state: state.with_turn(turn) }]
            }
        };
        Ok(next)
    }

    pub fn is_terminal(&self, state: &SystemState) -> Result<Option<TerminalReason>, DomainError> {
        if state.turn() == Turn::Stopped {
            return Ok(Some(TerminalReason::NaSelected));
        }
        let beliefs = self.beliefs(state)?;
        let met = self.scenario.targets.iter().all(|t| beliefs[t.parameter.0] >= t.threshold);
        Ok(met.then_some(TerminalReason::ThresholdMet))
    }

    /// Revenue collected if the process stops at `state`.
    pub fn revenue(&self, state: &SystemState) -> Result<Money, DomainError> {
        let beliefs = self.beliefs(state)?;
        Ok(self
            .scenario
            .targets
            .iter()
            .map(|t| {
                let p = beliefs[t.parameter.0];
                if p >= t.threshold {
                    t.revenue * p
                } else {
                    0.0
                }
            })
            .sum())
    }

    pub fn activity_cost(&self, action: Action) -> Money {
        match action {
            Action::Va(j) => self.scenario.verification_activities[j].activity_cost,
            Action::Ca(k) => self.scenario.correction_activities[k].activity_cost,
            Action::Na => 0.0,
        }
    }

    pub fn failure_cost(&self, action: Action) -> Money {
        match action {
            Action::Va(j) => self.scenario.verification_activities[j].failure_cost,
            _ => 0.0,
        }
    }

    /// Cost charged on a path for one executed step.
    pub fn step_cost(&self, action: Action, outcome: StepOutcome) -> Money {
        let fail = if outcome == StepOutcome::Fail { self.failure_cost(action) } else { 0.0 };
        self.activity_cost(action) + fail
    }

    pub fn action_label(&self, action: Action) -> String {
        match action {
            Action::Va(j) => self.scenario.verification_activities[j].name.clone(),
            Action::Ca(k) => self.scenario.correction_activities[k].name.clone(),
            Action::Na => "NA".to_string(),
        }
    }

    /// Inverse of [`Problem::action_label`].
    pub fn parse_action(&self, label: &str) -> Option<Action> {
        if label == "NA" {
            return Some(Action::Na);
        }
        let sc = &self.scenario;
        sc.verification_activities
            .iter()
            .position(|a| a.name == label)
            .map(Action::Va)
            .or_else(|| sc.correction_activities.iter().position(|a| a.name == label).map(Action::Ca))
    }

    pub fn encode_state(&self, state: &SystemState) -> String {
        state.encode(self.n_va(), self.n_ca())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{Cpt, Node, NodeKind};
    use crate::domain::{CorrectionActivity, Target, VerificationActivity};
    use approx::assert_abs_diff_eq;

    /// theta_1 -> theta_2 -> mu_2, theta_1 -> mu_1.
    fn two_param_problem() -> Problem {
        let net = BayesianNetwork::new(vec![
            Node { id: NodeId(0), name: "theta_1".into(), kind: NodeKind::Parameter, cpt: Cpt::prior(0.8) },
            Node {
                id: NodeId(1),
                name: "theta_2".into(),
                kind: NodeKind::Parameter,
                cpt: Cpt::new(vec![NodeId(0)], vec![0.3, 0.9]),
            },
            Node {
                id: NodeId(2),
                name: "mu_1".into(),
                kind: NodeKind::Observable,
                cpt: Cpt::new(vec![NodeId(0)], vec![0.2, 0.9]),
            },
            Node {
                id: NodeId(3),
                name: "mu_2".into(),
                kind: NodeKind::Observable,
                cpt: Cpt::new(vec![NodeId(1)], vec![0.1, 0.95]),
            },
        ])
        .unwrap();
        let scenario = Scenario {
            name: "two".into(),
            verification_activities: vec![
                VerificationActivity {
                    id: 1,
                    name: "mu_1".into(),
                    node: NodeId(2),
                    activity_cost: 300.0,
                    failure_cost: 0.0,
                },
                VerificationActivity {
                    id: 2,
                    name: "mu_2".into(),
                    node: NodeId(3),
                    activity_cost: 500.0,
                    failure_cost: 8000.0,
                },
            ],
            correction_activities: vec![
                CorrectionActivity {
                    id: 1,
                    name: "phi_1".into(),
                    target: NodeId(1),
                    activity_cost: 1000.0,
                    effect: Likelihood::new(0.6, 0.4).unwrap(),
                },
                CorrectionActivity {
                    id: 2,
                    name: "phi_2".into(),
                    target: NodeId(0),
                    activity_cost: 2000.0,
                    effect: Likelihood::new(0.9, 0.2).unwrap(),
                },
            ],
            targets: vec![Target { parameter: NodeId(0), revenue: 20000.0, threshold: 0.9 }],
            max_depth: None,
        };
        Problem::new(net, scenario).unwrap()
    }

    #[test]
    fn fresh_state_offers_every_va_and_na_last() {
        let p = two_param_problem();
        let actions = p.feasible_actions(&p.initial_state()).unwrap();
        assert_eq!(actions, vec![Action::Va(0), Action::Va(1), Action::Na]);
    }

    #[test]
    fn executed_va_is_excluded() {
        let p = two_param_problem();
        let s = p.initial_state().with_status(0, VaStatus::Fail);
        assert_eq!(p.feasible_actions(&s).unwrap(), vec![Action::Va(1), Action::Na]);
    }

    #[test]
    fn applied_ca_is_excluded() {
        let p = two_param_problem();
        let s = p.initial_state().with_turn(Turn::Ca).with_applied(0);
        assert_eq!(p.feasible_actions(&s).unwrap(), vec![Action::Ca(1), Action::Na]);
    }

    #[test]
    fn va_transition_matches_predictive() {
        let p = two_param_problem();
        let succ = p.transition(&p.initial_state(), Action::Va(0)).unwrap();
        assert_eq!(succ.len(), 2);
        assert_abs_diff_eq!(succ[0].probability, 0.76, epsilon = 1e-12);
        assert_abs_diff_eq!(succ[1].probability, 0.24, epsilon = 1e-12);
        assert_eq!(succ[0].state.turn(), Turn::Ca);
        assert_eq!(succ[1].state.va_status(0), VaStatus::Fail);
    }

    #[test]
    fn correction_invalidates_dependent_results() {
        let p = two_param_problem();
        let s = p.initial_state().with_status(0, VaStatus::Pass).with_status(1, VaStatus::Pass).with_turn(Turn::Ca);
        let next = p.transition(&s, Action::Ca(0)).unwrap()[0].state;
        // phi_1 corrects theta_2; mu_2 depends on it, mu_1 does not.
        assert_eq!(next.va_status(1), VaStatus::None);
        assert_eq!(next.va_status(0), VaStatus::Pass);
        assert!(next.ca_applied(0));
        assert!(!next.ca_applied(1));
        assert_eq!(next.turn(), Turn::Va);
    }

    #[test]
    fn correction_without_dependent_vas_only_sets_flag() {
        let p = two_param_problem();
        assert_eq!(p.invalidation_mask(0), 0b10);
        // theta_1 is an ancestor of everything observable.
        assert_eq!(p.invalidation_mask(1), 0b11);
    }

    #[test]
    fn infeasible_actions_rejected() {
        let p = two_param_problem();
        let s = p.initial_state();
        assert!(matches!(p.transition(&s, Action::Ca(0)), Err(DomainError::InfeasibleAction)));
        let s = s.with_status(0, VaStatus::Pass);
        assert!(matches!(p.transition(&s, Action::Va(0)), Err(DomainError::InfeasibleAction)));
    }

    #[test]
    fn na_on_va_turn_stops() {
        let p = two_param_problem();
        let stop = p.transition(&p.initial_state(), Action::Na).unwrap()[0].state;
        assert_eq!(p.is_terminal(&stop).unwrap(), Some(TerminalReason::NaSelected));
        assert!(matches!(p.feasible_actions(&stop), Err(DomainError::TerminalState)));
        let ca_turn = p.initial_state().with_turn(Turn::Ca);
        let back = p.transition(&ca_turn, Action::Na).unwrap()[0].state;
        assert_eq!(back.turn(), Turn::Va);
    }

    #[test]
    fn threshold_terminal() {
        let p = two_param_problem();
        // prior 0.8 < 0.9
        assert_eq!(p.is_terminal(&p.initial_state()).unwrap(), None);
        let s = p.initial_state().with_status(0, VaStatus::Pass);
        // 0.72 / 0.76 = 0.947 >= 0.9
        assert_eq!(p.is_terminal(&s).unwrap(), Some(TerminalReason::ThresholdMet));
        assert_abs_diff_eq!(p.revenue(&s).unwrap(), 20000.0 * 0.72 / 0.76, epsilon = 1e-9);
        assert_eq!(p.revenue(&p.initial_state()).unwrap(), 0.0);
    }
}
