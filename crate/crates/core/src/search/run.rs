use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    backup_and_update, build_random_tree, build_sample_tree, LookupTable, Method, NoPrior, PriorModel, Rule,
    SearchConfig, SearchError,
};
use crate::domain::{Action, Money, Problem, StrategyTree};
use crate::value::ForestPrior;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    /// 1-based count of sample trees built so far.
    pub tree_index: usize,
    pub best_value: Money,
    /// Seconds since the run started.
    pub wall_time: f64,
}

/// Best-so-far value recorded every `trace_every` trees and after the last one.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub points: Vec<TracePoint>,
}

impl ConvergenceTrace {
    pub fn values(&self) -> Vec<(usize, Money)> {
        self.points.iter().map(|p| (p.tree_index, p.best_value)).collect()
    }

    pub fn final_value(&self) -> Option<Money> {
        self.points.last().map(|p| p.best_value)
    }

    /// CSV with columns `tree_index,best_value,wall_time`. With
    /// `include_wall_time` off the column is written as 0 so the file is
    /// reproducible byte for byte.
    pub fn write_csv<W: std::io::Write>(&self, out: W, include_wall_time: bool) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["tree_index", "best_value", "wall_time"])?;
        for p in &self.points {
            let t = if include_wall_time { p.wall_time } else { 0.0 };
            w.write_record([p.tree_index.to_string(), p.best_value.to_string(), format!("{t:.6}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub method: Method,
    pub best_tree: StrategyTree,
    /// Exact strategy value of `best_tree` by path enumeration.
    pub best_value: Money,
    pub trace: ConvergenceTrace,
    /// Root action of every sample tree, in build order.
    pub root_actions: Vec<Action>,
    pub tree_values: Vec<Money>,
    /// Final lookup table.
    pub table: LookupTable,
    pub nodes_expanded: usize,
    pub elapsed: f64,
}

/// Runs `method` for `config.budget` sample trees from the initial state.
pub fn run_search(method: Method, problem: &Problem, config: &SearchConfig) -> Result<SearchResult, SearchError> {
    match method {
        Method::Ucbrb2 => {
            let mut prior = ForestPrior::new(config.forest.clone(), config.seed);
            run_with_prior(method, problem, config, &mut prior)
        }
        _ => run_with_prior(method, problem, config, &mut NoPrior),
    }
}

/// Like [`run_search`] with a caller-supplied prior model. The prior is only
/// consulted by the UCBRB rule.
pub fn run_with_prior(
    method: Method,
    problem: &Problem,
    config: &SearchConfig,
    prior: &mut dyn PriorModel,
) -> Result<SearchResult, SearchError> {
    config.validate()?;
    if config.budget == 0 {
        return Err(SearchError::InvalidConfig("budget must be positive".into()));
    }
    let start = Instant::now();
    let root = problem.initial_state();
    let mut table = LookupTable::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(Money, StrategyTree)> = None;
    let mut trace = ConvergenceTrace::default();
    let mut root_actions = Vec::with_capacity(config.budget);
    let mut tree_values = Vec::with_capacity(config.budget);
    let mut nodes_expanded = 0;

    for t in 1..=config.budget {
        let mut tree = match method.rule() {
            Some(rule) => build_sample_tree(problem, root, &table, config, rule, prior)?,
            None => random_tree(problem, config, &mut rng)?,
        };
        let value = backup_and_update(problem, &mut tree, &mut table)?;
        if method.rule() == Some(Rule::Ucbrb) {
            prior.observe_tree(problem, &tree, &table)?;
        }
        nodes_expanded += tree.nodes().iter().filter(|n| n.expansion_index.is_some()).count();
        root_actions.push(tree.root_action().unwrap_or(Action::Na));
        tree_values.push(value);
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, tree));
        }
        if t % config.trace_every == 0 || t == config.budget {
            trace.points.push(TracePoint {
                tree_index: t,
                best_value: best.as_ref().expect("at least one tree").0,
                wall_time: start.elapsed().as_secs_f64(),
            });
        }
    }

    let (_, best_tree) = best.expect("budget is positive");
    let best_value = best_tree.strategy_value(problem)?;
    Ok(SearchResult {
        method,
        best_tree,
        best_value,
        trace,
        root_actions,
        tree_values,
        table,
        nodes_expanded,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

fn random_tree(problem: &Problem, config: &SearchConfig, rng: &mut ChaCha8Rng) -> Result<StrategyTree, SearchError> {
    let root = problem.initial_state();
    for _ in 0..config.max_retries {
        if let Some(tree) = build_random_tree(problem, root, config.d10, rng)? {
            return Ok(tree);
        }
    }
    log::warn!("no random tree under {} nodes after {} attempts; stopping at the root", config.d10, config.max_retries);
    let mut tree = StrategyTree::new(root, problem)?;
    if !tree.is_complete() {
        // NA on the VA turn stops the process.
        tree.expand(0, Action::Na, problem, 0)?;
    }
    Ok(tree)
}
