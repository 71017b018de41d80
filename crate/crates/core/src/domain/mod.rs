//! The verification-planning decision domain: activities, system states,
//! transitions, terminal rules and the path/strategy value model.

mod path;
mod problem;
mod scenario;
mod state;
mod strategy;

pub use path::{path_probability, path_value, PathStep, VerificationPath};
pub use problem::{Problem, Successor, TerminalReason};
pub use scenario::{CorrectionActivity, Scenario, Target, VerificationActivity, MAX_ACTIVITIES};
pub use state::{Action, StepOutcome, SystemState, Turn, VaStatus};
pub use strategy::{Branch, StrategyTree, TreeNode, TreeNodeKind};

/// Money in thousands of dollars.
pub type Money = f64;

#[derive(Debug, thiserror::Error)]
pub enum DomainError {
    #[error(transparent)]
    Bayes(#[from] crate::bayes::BayesError),
    #[error("state is terminal")]
    TerminalState,
    #[error("action is not feasible in this state")]
    InfeasibleAction,
    #[error("path does not end in a terminal state")]
    NonTerminalPath,
    #[error("path step {0} does not follow from the previous state")]
    BrokenPath(usize),
    #[error("strategy tree has unexpanded tips")]
    IncompleteTree,
    #[error("strategy tree node {0} has out-of-order children")]
    MalformedTree(usize),
    #[error("node {0} is not an unexpanded tip")]
    NotATip(usize),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
