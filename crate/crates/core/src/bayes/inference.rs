//! Exact inference by variable elimination.
//!
//! Factors range over binary variables. A factor's table is indexed by a bit
//! pattern whose bit `i` is the state (Pass = 1) of `vars[i]`, with `vars`
//! kept sorted. Before eliminating, nodes that are neither queried nor
//! ancestors of a query or evidence node are dropped; they sum out to one.

use std::collections::{BTreeMap, BTreeSet};

use super::{BayesError, BayesianNetwork, EvidenceItem, NodeId, NodeKind, Outcome};

#[derive(Debug, Clone)]
struct Factor {
    vars: Vec<usize>,
    table: Vec<f64>,
}

impl Factor {
    fn from_cpt(net: &BayesianNetwork, node: usize) -> Factor {
        let cpt = &net.nodes()[node].cpt;
        let mut vars: Vec<usize> = cpt.parents.iter().map(|p| p.0).collect();
        vars.push(node);
        vars.sort_unstable();
        let pos = |v: usize| vars.binary_search(&v).expect("var in scope");
        let node_bit = pos(node);
        let parent_bits: Vec<usize> = cpt.parents.iter().map(|p| pos(p.0)).collect();
        let mut table = vec![0.0; 1 << vars.len()];
        for (idx, slot) in table.iter_mut().enumerate() {
            let row = parent_bits.iter().fold(0usize, |acc, &b| (acc << 1) | ((idx >> b) & 1));
            let p = cpt.table[row];
            *slot = if (idx >> node_bit) & 1 == 1 { p } else { 1.0 - p };
        }
        Factor { vars, table }
    }

    /// Fixes `var` to `pass`, removing it from the scope.
    fn reduce(&self, var: usize, pass: bool) -> Factor {
        let Ok(bit) = self.vars.binary_search(&var) else {
            return self.clone();
        };
        let vars: Vec<usize> = self.vars.iter().copied().filter(|&v| v != var).collect();
        let low_mask = (1usize << bit) - 1;
        let table = (0..1usize << vars.len())
            .map(|idx| {
                let full = (idx & low_mask) | ((idx & !low_mask) << 1) | (usize::from(pass) << bit);
                self.table[full]
            })
            .collect();
        Factor { vars, table }
    }

    fn scale_var(&mut self, var: usize, pass: f64, fail: f64) {
        let bit = self.vars.binary_search(&var).expect("var in scope");
        for (idx, v) in self.table.iter_mut().enumerate() {
            *v *= if (idx >> bit) & 1 == 1 { pass } else { fail };
        }
    }

    fn product(&self, other: &Factor) -> Factor {
        let mut vars = self.vars.clone();
        vars.extend_from_slice(&other.vars);
        vars.sort_unstable();
        vars.dedup();
        let map =
            |scope: &[usize]| -> Vec<usize> { scope.iter().map(|v| vars.binary_search(v).expect("subset")).collect() };
        let a_bits = map(&self.vars);
        let b_bits = map(&other.vars);
        let project = |idx: usize, bits: &[usize]| -> usize {
            bits.iter().enumerate().fold(0usize, |acc, (i, &b)| acc | (((idx >> b) & 1) << i))
        };
        let table = (0..1usize << vars.len())
            .map(|idx| self.table[project(idx, &a_bits)] * other.table[project(idx, &b_bits)])
            .collect();
        Factor { vars, table }
    }

    fn sum_out(&self, var: usize) -> Factor {
        let bit = self.vars.binary_search(&var).expect("var in scope");
        let vars: Vec<usize> = self.vars.iter().copied().filter(|&v| v != var).collect();
        let low_mask = (1usize << bit) - 1;
        let table = (0..1usize << vars.len())
            .map(|idx| {
                let base = (idx & low_mask) | ((idx & !low_mask) << 1);
                self.table[base] + self.table[base | (1 << bit)]
            })
            .collect();
        Factor { vars, table }
    }
}

/// Evidence resolved to per-node lookups.
struct ResolvedEvidence {
    hard: BTreeMap<usize, bool>,
    soft: BTreeMap<usize, (f64, f64)>,
}

fn resolve(net: &BayesianNetwork, evidence: &[EvidenceItem]) -> Result<ResolvedEvidence, BayesError> {
    let mut hard = BTreeMap::new();
    let mut soft = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for item in evidence {
        let node = item.node();
        let kind = net.kind(node)?;
        if !seen.insert(node) {
            return Err(BayesError::DuplicateEvidence(node));
        }
        match *item {
            EvidenceItem::Hard { state, .. } => {
                if kind != NodeKind::Observable {
                    return Err(BayesError::HardEvidenceOnParameter(node));
                }
                hard.insert(node.0, state.is_pass());
            }
            EvidenceItem::Virtual { likelihood, .. } => {
                soft.insert(node.0, (likelihood.pass(), likelihood.fail()));
            }
        }
    }
    Ok(ResolvedEvidence { hard, soft })
}

/// Marginal `P(query = Pass | evidence)` by variable elimination.
fn marginal(net: &BayesianNetwork, ev: &ResolvedEvidence, query: usize) -> Result<f64, BayesError> {
    let relevant =
        net.ancestral_closure(std::iter::once(query).chain(ev.hard.keys().copied()).chain(ev.soft.keys().copied()));
    let mut factors: Vec<Factor> = Vec::new();
    for (node, keep) in relevant.iter().enumerate() {
        if !keep {
            continue;
        }
        let mut f = Factor::from_cpt(net, node);
        if let Some(&(pass, fail)) = ev.soft.get(&node) {
            f.scale_var(node, pass, fail);
        }
        for (&var, &pass) in &ev.hard {
            f = f.reduce(var, pass);
        }
        factors.push(f);
    }

    // The query itself may be hard-observed; it then no longer appears in any scope.
    let mut remaining: BTreeSet<usize> = factors.iter().flat_map(|f| f.vars.iter().copied()).collect();
    remaining.remove(&query);
    while !remaining.is_empty() {
        let var = min_degree_var(&factors, &remaining);
        remaining.remove(&var);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.binary_search(&var).is_ok());
        factors = rest;
        let merged = touching.iter().skip(1).fold(touching[0].clone(), |acc, f| acc.product(f));
        factors.push(merged.sum_out(var));
    }

    let result = factors
        .iter()
        .skip(1)
        .fold(factors.first().cloned().unwrap_or(Factor { vars: vec![], table: vec![1.0] }), |acc, f| acc.product(f));
    let (p_fail, p_pass) = match result.vars.as_slice() {
        [] => {
            // Query observed: its state is fixed, the scalar is P(evidence).
            let z = result.table[0];
            let pass = ev.hard.get(&query).copied().unwrap_or(false);
            if pass {
                (0.0, z)
            } else {
                (z, 0.0)
            }
        }
        [v] if *v == query => (result.table[0], result.table[1]),
        _ => unreachable!("only the query variable survives elimination"),
    };
    let z = p_pass + p_fail;
    if !(z > 0.0) || !z.is_finite() {
        return Err(BayesError::InconsistentEvidence);
    }
    Ok(p_pass / z)
}

/// Variable with the fewest neighbours in the current interaction graph; ties to
/// the lowest index.
fn min_degree_var(factors: &[Factor], remaining: &BTreeSet<usize>) -> usize {
    let mut best = (usize::MAX, usize::MAX);
    for &v in remaining {
        let mut neigh = BTreeSet::new();
        for f in factors.iter().filter(|f| f.vars.binary_search(&v).is_ok()) {
            neigh.extend(f.vars.iter().copied());
        }
        let degree = neigh.len();
        if degree < best.0 {
            best = (degree, v);
        }
    }
    best.1
}

/// Exact posterior `P(node = Pass | evidence)` for every queried node.
pub fn posterior(
    net: &BayesianNetwork,
    evidence: &[EvidenceItem],
    query: &[NodeId],
) -> Result<BTreeMap<NodeId, f64>, BayesError> {
    let ev = resolve(net, evidence)?;
    query
        .iter()
        .map(|&q| {
            net.node(q)?;
            marginal(net, &ev, q.0).map(|p| (q, p))
        })
        .collect()
}

/// Posterior of every node in index order.
pub fn all_marginals(net: &BayesianNetwork, evidence: &[EvidenceItem]) -> Result<Vec<f64>, BayesError> {
    let ev = resolve(net, evidence)?;
    (0..net.len()).map(|q| marginal(net, &ev, q)).collect()
}

/// Probability that observing `node` next yields Pass.
pub fn predictive(net: &BayesianNetwork, evidence: &[EvidenceItem], node: NodeId) -> Result<f64, BayesError> {
    if net.kind(node)? != NodeKind::Observable {
        return Err(BayesError::NotObservable(node));
    }
    if evidence.iter().any(|e| matches!(e, EvidenceItem::Hard { node: n, .. } if *n == node)) {
        return Err(BayesError::AlreadyObserved(node));
    }
    let ev = resolve(net, evidence)?;
    marginal(net, &ev, node.0)
}

/// Convenience for building hard evidence lists.
pub fn hard(node: NodeId, state: Outcome) -> EvidenceItem {
    EvidenceItem::Hard { node, state }
}
