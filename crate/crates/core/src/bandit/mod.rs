//! Max-reward multi-armed bandit lab: arm distributions, selection rules and
//! regret simulation.

mod arms;
mod policy;
mod sim;
mod tail;

pub use arms::ArmDistribution;
pub use policy::{
    cvar, estimate_d0, marab_select, sp_mcts_select, ucbrb_index, ucbrb_select, uct_select, ArmStats, D0Mode,
    PolicyConfig, DEFAULT_D0_FLOOR,
};
pub use sim::{log_checkpoints, run_once, simulate_regret, RegretCurve, RegretPoint};
pub use tail::{exponential_tail_bound, max_tail_probability, TailEstimate};

#[derive(Debug, thiserror::Error)]
pub enum BanditError {
    #[error("no arms")]
    NoArms,
    #[error("arm {0} has not been played")]
    UnplayedArm(usize),
    #[error("arm {0} needs at least two plays to estimate D0")]
    InsufficientPlays(usize),
    #[error("invalid arm distribution {0:?}")]
    InvalidArm(ArmDistribution),
    #[error("invalid policy parameters {0:?}")]
    InvalidPolicy(PolicyConfig),
    #[error("horizon {horizon} is shorter than the {required} warm-up plays")]
    HorizonTooShort { horizon: u64, required: u64 },
    #[error("at least one replication is required")]
    NoReplications,
}
