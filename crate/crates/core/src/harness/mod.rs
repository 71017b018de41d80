//! Scenario generation, experiment orchestration and strategy export.

mod experiment;
mod export;
mod scenarios;

pub use experiment::{
    run_experiment, run_experiment_on, ExperimentReport, ExperimentSpec, RunSpec, RunSummary, DEFAULT_D6_GRID,
};
pub use export::{export_strategy, import_strategy, ExportFormat, StrategyBranch, StrategyDocument, StrategyNode};
pub use scenarios::{
    generate_problem, generate_scenario, generate_scenario_with, GeneratorSettings, Template, REVENUE, THRESHOLD,
};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Bayes(#[from] crate::bayes::BayesError),
    #[error(transparent)]
    Domain(#[from] crate::domain::DomainError),
    #[error(transparent)]
    Search(#[from] crate::search::SearchError),
    #[error(transparent)]
    Oracle(#[from] crate::oracle::OracleError),
    #[error(transparent)]
    Bandit(#[from] crate::bandit::BanditError),
    #[error("unknown scenario template `{0}`")]
    UnknownTemplate(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}
