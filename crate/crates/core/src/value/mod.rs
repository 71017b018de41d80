//! Random-forest state-value prior: features, regression trees, forests and
//! the periodic training loop that feeds the search.

mod features;
mod forest;
mod prior;
mod tree;

pub use features::{extract_features, feature_len};
pub use forest::{collapse_duplicates, nearest_rank, RegressionForest};
pub use prior::{ForestConfig, ForestPrior, PeriodSummary};
pub use tree::{RegressionTree, TreeNode};

#[derive(Debug, thiserror::Error)]
pub enum ValueError {
    #[error(transparent)]
    Domain(#[from] crate::domain::DomainError),
    #[error("no training samples")]
    EmptyTrainingSet,
    #[error("forest has no trees")]
    UntrainedForest,
    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid forest configuration: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
