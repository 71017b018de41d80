use approx::assert_abs_diff_eq;

use super::*;
use crate::bayes::{BayesianNetwork, Cpt, Likelihood, Node, NodeId, NodeKind};
use crate::domain::{Action, CorrectionActivity, Problem, Scenario, Target, VerificationActivity};
use crate::harness::{generate_problem, generate_scenario, Template};

#[test]
fn tiny_value_and_action() {
    let p = generate_problem(Template::Tiny, 0).unwrap();
    let table = backward_induction(&p, DEFAULT_STATE_CAP).unwrap();
    let v = table.value(&p.initial_state()).unwrap();
    assert_abs_diff_eq!(v, 15000.0, epsilon = 1e-9);
    assert_eq!(table.action(&p.initial_state()), Some(Action::Va(0)));
    let (tree, bv) = brute_force_enumerate(&p, 6).unwrap();
    assert_abs_diff_eq!(bv, 15000.0, epsilon = 1e-9);
    assert_eq!(tree.root_action(), Some(Action::Va(0)));
}

#[test]
fn terminal_initial_state() {
    let (net, mut sc) = generate_scenario(Template::Tiny, 0).unwrap();
    sc.targets[0].threshold = 0.8;
    let p = Problem::new(net, sc).unwrap();
    let table = backward_induction(&p, DEFAULT_STATE_CAP).unwrap();
    assert_abs_diff_eq!(table.value(&p.initial_state()).unwrap(), 20000.0 * 0.85, epsilon = 1e-9);
    assert_eq!(table.action(&p.initial_state()), None);
}

#[test]
fn prohibitive_costs_mean_stop() {
    let (net, mut sc) = generate_scenario(Template::Tiny, 0).unwrap();
    sc.verification_activities[0].activity_cost = 20000.0;
    let p = Problem::new(net, sc).unwrap();
    let table = backward_induction(&p, DEFAULT_STATE_CAP).unwrap();
    assert_eq!(table.value(&p.initial_state()), Some(0.0));
    assert_eq!(table.action(&p.initial_state()), Some(Action::Na));
}

#[test]
fn zero_revenue_gives_zero() {
    let (net, mut sc) = generate_scenario(Template::Tiny, 0).unwrap();
    sc.targets[0].revenue = 0.0;
    let p = Problem::new(net, sc).unwrap();
    let (tree, v) = brute_force_enumerate(&p, 6).unwrap();
    assert_eq!(v, 0.0);
    assert_eq!(tree.root_action(), Some(Action::Na));
}

/// One parameter observed by two identical VAs, one CA.
fn symmetric() -> Problem {
    let obs = |id: usize| Node {
        id: NodeId(id),
        name: format!("mu_{id}"),
        kind: NodeKind::Observable,
        cpt: Cpt::new(vec![NodeId(0)], vec![0.2, 0.9]),
    };
    let net = BayesianNetwork::new(vec![
        Node { id: NodeId(0), name: "theta".into(), kind: NodeKind::Parameter, cpt: Cpt::prior(0.7) },
        obs(1),
        obs(2),
    ])
    .unwrap();
    let va = |id: u32| VerificationActivity {
        id,
        name: format!("mu_{id}"),
        node: NodeId(id as usize),
        activity_cost: 400.0,
        failure_cost: 500.0,
    };
    let sc = Scenario {
        name: "sym".into(),
        verification_activities: vec![va(1), va(2)],
        correction_activities: vec![CorrectionActivity {
            id: 1,
            name: "phi".into(),
            target: NodeId(0),
            activity_cost: 1500.0,
            effect: Likelihood::new(1.0, 0.3).unwrap(),
        }],
        targets: vec![Target { parameter: NodeId(0), revenue: 20000.0, threshold: 0.9 }],
        max_depth: None,
    };
    Problem::new(net, sc).unwrap()
}

#[test]
fn oracles_agree_and_break_ties_low() {
    let p = symmetric();
    let table = backward_induction(&p, DEFAULT_STATE_CAP).unwrap();
    let (tree, bv) = brute_force_enumerate(&p, 8).unwrap();
    let v = table.value(&p.initial_state()).unwrap();
    assert_abs_diff_eq!(v, bv, epsilon = 1e-9);
    assert_eq!(tree.root_action(), Some(Action::Va(0)));
    assert_eq!(table.action(&p.initial_state()), Some(Action::Va(0)));
    let extracted = table.extract_strategy(&p).unwrap();
    assert_abs_diff_eq!(extracted.strategy_value(&p).unwrap(), v, epsilon = 1e-9);
}

/// The small template cut down to four VAs and two CAs.
fn reduced_small() -> Problem {
    let (net, mut sc) = generate_scenario(Template::Small, 1).unwrap();
    sc.verification_activities.truncate(4);
    sc.correction_activities.truncate(2);
    Problem::new(net, sc).unwrap()
}

#[test]
fn values_dominate_stopping() {
    let p = reduced_small();
    let table = backward_induction(&p, DEFAULT_STATE_CAP).unwrap();
    for (state, (v, action)) in table.iter() {
        if action.is_some() && state.turn() == crate::domain::Turn::Va {
            assert!(*v >= p.revenue(state).unwrap() - 1e-9);
        }
    }
    let tree = table.extract_strategy(&p).unwrap();
    assert_abs_diff_eq!(tree.strategy_value(&p).unwrap(), table.value(&p.initial_state()).unwrap(), epsilon = 1e-6);
}

#[test]
fn state_cap_is_enforced() {
    let p = generate_problem(Template::Small, 1).unwrap();
    assert!(matches!(backward_induction(&p, 100), Err(OracleError::StateSpaceTooLarge { cap: 100 })));
}

#[test]
fn enumeration_refuses_large_instances() {
    let p = generate_problem(Template::Small, 1).unwrap();
    assert!(matches!(brute_force_enumerate(&p, 4), Err(OracleError::InstanceTooLarge(_))));
    let tiny = generate_problem(Template::Tiny, 0).unwrap();
    assert!(brute_force_enumerate(&tiny, 9).is_err());
}
