//! Sample-tree search over strategy trees: UCBRB with an optional value
//! prior, UCT and SP-MCTS rule plug-ins, and a random Monte Carlo baseline.

mod build;
mod config;
mod run;
mod select;
mod table;

pub use build::{backup_and_update, build_random_tree, build_sample_tree};
pub use config::{Method, Rule, SearchConfig};
pub use run::{run_search, run_with_prior, ConvergenceTrace, SearchResult, TracePoint};
pub use select::{select_action, ucb_state, NoPrior, PriorModel};
pub use table::{LookupTable, TableEntry};

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Domain(#[from] crate::domain::DomainError),
    #[error(transparent)]
    Value(#[from] crate::value::ValueError),
    #[error("sample tree exceeded {cap} nodes")]
    NodeBudgetExceeded { cap: usize },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
}

#[cfg(test)]
mod tests;
