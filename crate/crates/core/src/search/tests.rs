use approx::assert_abs_diff_eq;

use super::*;
use crate::domain::{Action, Problem, StepOutcome, Turn};
use crate::harness::{generate_problem, Template};

fn tiny() -> Problem {
    generate_problem(Template::Tiny, 0).unwrap()
}

fn config(budget: usize) -> SearchConfig {
    SearchConfig { budget, trace_every: 1, ..Default::default() }
}

#[test]
fn unvisited_states_prefer_na() {
    let p = tiny();
    let table = LookupTable::new();
    let a = select_action(&p, &p.initial_state(), 0, &table, &config(1), Rule::Ucbrb, &mut NoPrior).unwrap();
    assert_eq!(a, Action::Na);
}

#[test]
fn first_tree_is_stop_only() {
    let p = tiny();
    let r = run_search(Method::Ucbrb1, &p, &config(1)).unwrap();
    assert_eq!(r.best_tree.root_action(), Some(Action::Na));
    assert_eq!(r.best_value, 0.0);
    assert_eq!(r.best_tree.len(), 2);
}

#[test]
fn ucbrb1_reaches_tiny_optimum() {
    let p = tiny();
    let r = run_search(Method::Ucbrb1, &p, &config(50)).unwrap();
    assert_abs_diff_eq!(r.best_value, 15000.0, epsilon = 1e-9);
    assert_eq!(r.best_tree.root_action(), Some(Action::Va(0)));
}

#[test]
fn chance_node_has_two_children() {
    let p = tiny();
    let r = run_search(Method::Ucbrb1, &p, &config(50)).unwrap();
    let root = r.best_tree.root();
    assert_eq!(root.branches().len(), 2);
    assert_eq!(root.branches()[0].outcome, StepOutcome::Pass);
    let total: f64 = root.branches().iter().map(|b| b.probability).sum();
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
}

#[test]
fn root_already_terminal_gives_single_node() {
    let (net, mut scenario) = crate::harness::generate_scenario(Template::Tiny, 0).unwrap();
    scenario.targets[0].threshold = 0.8;
    let p = Problem::new(net, scenario).unwrap();
    let table = LookupTable::new();
    let tree = build_sample_tree(&p, p.initial_state(), &table, &config(1), Rule::Ucbrb, &mut NoPrior).unwrap();
    assert_eq!(tree.len(), 1);
}

#[test]
fn trace_is_monotone_and_complete() {
    let p = generate_problem(Template::Small, 1).unwrap();
    let cfg = SearchConfig { budget: 120, trace_every: 50, ..Default::default() };
    for method in Method::ALL {
        let r = run_search(method, &p, &cfg).unwrap();
        let idx: Vec<usize> = r.trace.points.iter().map(|t| t.tree_index).collect();
        assert_eq!(idx, vec![50, 100, 120]);
        assert!(r.trace.points.windows(2).all(|w| w[0].best_value <= w[1].best_value));
        assert_abs_diff_eq!(r.trace.final_value().unwrap(), r.best_value, epsilon = 1e-6);
        assert_eq!(r.root_actions.len(), 120);
    }
}

#[test]
fn monte_carlo_trees_respect_node_limit() {
    let p = generate_problem(Template::Small, 2).unwrap();
    let cfg = SearchConfig { budget: 30, ..Default::default() };
    let r = run_search(Method::MonteCarlo, &p, &cfg).unwrap();
    assert!(r.best_tree.len() < cfg.d10);
}

#[test]
fn same_seed_same_run() {
    let p = generate_problem(Template::Small, 4).unwrap();
    let cfg = SearchConfig { budget: 60, trace_every: 10, seed: 5, ..Default::default() };
    for method in [Method::Ucbrb1, Method::MonteCarlo] {
        let a = run_search(method, &p, &cfg).unwrap();
        let b = run_search(method, &p, &cfg).unwrap();
        assert_eq!(a.trace.values(), b.trace.values());
        assert_eq!(a.best_tree, b.best_tree);
    }
}

#[test]
fn visit_counts_count_trees() {
    let p = tiny();
    let mut table = LookupTable::new();
    let cfg = config(3);
    for _ in 0..3 {
        let mut tree = build_sample_tree(&p, p.initial_state(), &table, &cfg, Rule::Ucbrb, &mut NoPrior).unwrap();
        backup_and_update(&p, &mut tree, &mut table).unwrap();
    }
    assert_eq!(table.visits(&p.initial_state()), 3);
    let stopped = p.initial_state().with_turn(Turn::Stopped);
    assert_eq!(table.visits(&stopped), 1);
}

#[test]
fn tiny_node_cap_is_reported() {
    let p = generate_problem(Template::Small, 1).unwrap();
    let cfg = SearchConfig { budget: 200, max_nodes: 3, ..Default::default() };
    let err = run_search(Method::Ucbrb1, &p, &cfg).unwrap_err();
    assert!(matches!(err, SearchError::NodeBudgetExceeded { cap: 3 }));
}

#[test]
fn backed_up_root_matches_path_sum() {
    let p = generate_problem(Template::Small, 3).unwrap();
    let cfg = SearchConfig { budget: 200, ..Default::default() };
    let r = run_search(Method::Ucbrb1, &p, &cfg).unwrap();
    let mut tree = r.best_tree.clone();
    let root = tree.backup(&p).unwrap();
    assert_abs_diff_eq!(root, tree.strategy_value(&p).unwrap(), epsilon = 1e-9);
}

#[test]
fn max_depth_forces_stop() {
    let (net, mut scenario) = crate::harness::generate_scenario(Template::Small, 1).unwrap();
    scenario.max_depth = Some(1);
    let p = Problem::new(net, scenario).unwrap();
    let r = run_search(Method::Ucbrb1, &p, &SearchConfig { budget: 100, ..Default::default() }).unwrap();
    assert!(r.best_tree.max_depth() <= 3);
}
