//! Exact solvers for small instances: backward induction over the reachable
//! state space and brute-force strategy enumeration.

mod brute;
mod induction;

pub use brute::{brute_force_enumerate, count_strategies, MAX_BRUTE_DEPTH};
pub use induction::{backward_induction, StateValueTable, DEFAULT_STATE_CAP};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Domain(#[from] crate::domain::DomainError),
    #[error("more than {cap} reachable states")]
    StateSpaceTooLarge { cap: usize },
    #[error("instance too large for enumeration: {0}")]
    InstanceTooLarge(String),
    #[error("successor state missing from the value table")]
    MissingState,
}

#[cfg(test)]
mod tests;
