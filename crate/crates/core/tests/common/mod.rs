//! Shared fixtures and independent reference computations for the integration tests.

#![allow(dead_code)]

use jvcs::bayes::{
    noisy_and_cpt, noisy_or_cpt, BayesianNetwork, Cpt, EvidenceItem, Likelihood, Node, NodeId, NodeKind, Outcome,
};
use jvcs::domain::{Action, Problem, StrategyTree};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random network with `n_params` parameters followed by observables. Every
/// node picks up to three earlier parameters as parents and gets a Noisy-OR or
/// Noisy-AND table; observables may also depend on nothing.
pub fn random_network(rng: &mut impl Rng, n_params: usize, n_obs: usize) -> BayesianNetwork {
    let mut nodes = Vec::new();
    for i in 0..n_params + n_obs {
        let kind = if i < n_params { NodeKind::Parameter } else { NodeKind::Observable };
        let pool: Vec<usize> = (0..i.min(n_params)).collect();
        let k = rng.random_range(0..=pool.len().min(3));
        let mut parents: Vec<NodeId> = pool.choose_multiple(rng, k).map(|&p| NodeId(p)).collect();
        parents.sort();
        let weights: Vec<f64> = parents.iter().map(|_| rng.random_range(0.1..0.9)).collect();
        let cpt = if parents.is_empty() {
            Cpt::prior(rng.random_range(0.05..0.95))
        } else if rng.random_bool(0.5) {
            noisy_or_cpt(parents, rng.random_range(0.02..0.5), &weights).unwrap()
        } else {
            noisy_and_cpt(parents, rng.random_range(0.5..0.98), &weights).unwrap()
        };
        nodes.push(Node { id: NodeId(i), name: format!("x{i}"), kind, cpt });
    }
    BayesianNetwork::new(nodes).unwrap()
}

/// Hard evidence on some observables and virtual evidence on some other nodes.
pub fn random_evidence(rng: &mut impl Rng, net: &BayesianNetwork) -> Vec<EvidenceItem> {
    let mut ev = Vec::new();
    for node in net.nodes() {
        let roll: f64 = rng.random();
        if node.kind == NodeKind::Observable && roll < 0.35 {
            let state = if rng.random_bool(0.5) { Outcome::Pass } else { Outcome::Fail };
            ev.push(EvidenceItem::Hard { node: node.id, state });
        } else if roll > 0.75 {
            let likelihood = Likelihood::new(rng.random_range(0.05..1.0), rng.random_range(0.05..1.0)).unwrap();
            ev.push(EvidenceItem::Virtual { node: node.id, likelihood });
        }
    }
    ev
}

/// `P(query = Pass | evidence)` by summing the full joint over all `2^n` assignments.
pub fn joint_posterior(net: &BayesianNetwork, evidence: &[EvidenceItem], query: NodeId) -> f64 {
    let n = net.len();
    let (mut num, mut den) = (0.0, 0.0);
    for bits in 0u32..(1 << n) {
        let pass = |i: usize| bits >> i & 1 == 1;
        let mut w = 1.0;
        for node in net.nodes() {
            let parents: Vec<bool> = node.cpt.parents.iter().map(|p| pass(p.0)).collect();
            let p = node.cpt.p_pass(&parents);
            w *= if pass(node.id.0) { p } else { 1.0 - p };
        }
        for item in evidence {
            w *= match *item {
                EvidenceItem::Hard { node, state } => f64::from(u8::from(pass(node.0) == state.is_pass())),
                EvidenceItem::Virtual { node, likelihood } => {
                    if pass(node.0) {
                        likelihood.pass()
                    } else {
                        likelihood.fail()
                    }
                }
            };
        }
        den += w;
        if pass(query.0) {
            num += w;
        }
    }
    num / den
}

/// A complete tree built by uniformly random feasible choices, forcing NA once
/// `node_limit` nodes exist so the tree stays small.
pub fn random_complete_tree(problem: &Problem, seed: u64, node_limit: usize) -> StrategyTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = StrategyTree::new(problem.initial_state(), problem).unwrap();
    let mut m = 0;
    loop {
        let Some(tip) = tree.tips().next() else { break };
        let state = tree.node(tip).state;
        let action = if tree.len() >= node_limit {
            Action::Na
        } else {
            *problem.feasible_actions(&state).unwrap().choose(&mut rng).unwrap()
        };
        tree.expand(tip, action, problem, m).unwrap();
        m += 1;
    }
    tree
}
