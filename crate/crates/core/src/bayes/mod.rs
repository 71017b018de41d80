//! Binary Bayesian networks: structure, exact inference with hard and virtual
//! evidence, and Noisy-OR / Noisy-AND CPT generators.

mod evidence;
mod generate;
mod inference;
mod network;

pub use evidence::{EvidenceItem, Likelihood, Outcome};
pub use generate::{noisy_and_cpt, noisy_and_table, noisy_or_cpt, noisy_or_table};
pub use inference::{all_marginals, hard, posterior, predictive};
pub use network::{
    validate_network, BayesianNetwork, Cpt, NetworkFile, Node, NodeId, NodeKind, NodeRecord, DEFAULT_MAX_PARENTS,
};

#[derive(Debug, thiserror::Error)]
pub enum BayesError {
    #[error("cycle detected through nodes {0:?}")]
    CycleDetected(Vec<NodeId>),
    #[error("malformed CPT on node {node} at row {row}")]
    MalformedCpt { node: NodeId, row: usize },
    #[error("illegal edge {from} -> {to}: observables cannot be parents of parameters")]
    IllegalEdge { from: NodeId, to: NodeId },
    #[error("node ids must be dense: position {position} holds id {id}")]
    NonDenseIds { position: usize, id: NodeId },
    #[error("{count} parents exceed the cap of {cap}")]
    TooManyParents { count: usize, cap: usize },
    #[error("{parents} parents but {weights} weights")]
    ArityMismatch { parents: usize, weights: usize },
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("evidence has probability zero")]
    InconsistentEvidence,
    #[error("more than one evidence item on node {0}")]
    DuplicateEvidence(NodeId),
    #[error("hard evidence is only allowed on observable nodes, got {0}")]
    HardEvidenceOnParameter(NodeId),
    #[error("node {0} already carries hard evidence")]
    AlreadyObserved(NodeId),
    #[error("node {0} is not observable")]
    NotObservable(NodeId),
    #[error("invalid likelihood pair ({pass}, {fail})")]
    InvalidLikelihood { pass: f64, fail: f64 },
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
