//! Arm-selection rules. Every rule breaks ties toward the lowest arm index.

use serde::{Deserialize, Serialize};

use super::BanditError;

/// Running aggregates for one arm.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ArmStats {
    pub plays: u64,
    pub max: f64,
    pub min: f64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl ArmStats {
    pub fn record(&mut self, x: f64) {
        if self.plays == 0 {
            self.max = x;
            self.min = x;
        } else {
            self.max = self.max.max(x);
            self.min = self.min.min(x);
        }
        self.plays += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.plays as f64
    }
}

/// How the UCBRB constant is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum D0Mode {
    Fixed(f64),
    /// Re-estimated from the arm statistics before every pull, assuming uniform arms.
    Estimated {
        floor: f64,
    },
}

pub const DEFAULT_D0_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyConfig {
    Ucbrb { d0: D0Mode },
    Uct { d1: f64 },
    SpMcts { d2: f64, d3: f64 },
    Marab { d4: f64, alpha: f64, window: Option<usize> },
}

impl PolicyConfig {
    /// Plays per arm before the selection rule takes over.
    pub fn initial_plays(&self) -> u64 {
        match self {
            PolicyConfig::Ucbrb { d0: D0Mode::Estimated { .. } } => 2,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<(), BanditError> {
        let ok = match *self {
            PolicyConfig::Ucbrb { d0: D0Mode::Fixed(d) } => d > 0.0,
            PolicyConfig::Ucbrb { d0: D0Mode::Estimated { floor } } => floor > 0.0,
            PolicyConfig::Uct { d1 } => d1 >= 0.0,
            PolicyConfig::SpMcts { d2, d3 } => d2 >= 0.0 && d3 >= 0.0,
            PolicyConfig::Marab { d4, alpha, .. } => d4 >= 0.0 && alpha > 0.0 && alpha <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(BanditError::InvalidPolicy(*self))
        }
    }
}

fn argmax(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, s) in scores.enumerate() {
        if s > best.1 {
            best = (i, s);
        }
    }
    best.0
}

fn require_played(stats: &[ArmStats]) -> Result<(), BanditError> {
    match stats.iter().position(|s| s.plays == 0) {
        Some(k) => Err(BanditError::UnplayedArm(k)),
        None if stats.is_empty() => Err(BanditError::NoArms),
        None => Ok(()),
    }
}

/// `x_max + 4 ln(n) / (D0 n_k)`.
pub fn ucbrb_index(stats: &ArmStats, d0: f64, n: u64) -> f64 {
    stats.max + 4.0 * (n as f64).ln() / (d0 * stats.plays as f64)
}

pub fn ucbrb_select(stats: &[ArmStats], d0: f64, n: u64) -> Result<usize, BanditError> {
    require_played(stats)?;
    Ok(argmax(stats.iter().map(|s| ucbrb_index(s, d0, n))))
}

/// Uniform-arm estimate `min_k (n_k - 1) / ((n_k + 1)(x_max - x_min))`, floored.
///
/// A constant-reward arm has no usable range; it contributes the floor.
pub fn estimate_d0(stats: &[ArmStats], floor: f64) -> Result<f64, BanditError> {
    if stats.is_empty() {
        return Err(BanditError::NoArms);
    }
    let mut d0 = f64::INFINITY;
    for (k, s) in stats.iter().enumerate() {
        if s.plays < 2 {
            return Err(BanditError::InsufficientPlays(k));
        }
        let range = s.max - s.min;
        let estimate = if range > 0.0 {
            (s.plays - 1) as f64 / ((s.plays + 1) as f64 * range)
        } else {
            log::warn!("arm {k} has constant rewards; D0 falls back to the floor");
            floor
        };
        d0 = d0.min(estimate);
    }
    Ok(d0.max(floor))
}

/// `mean + D1 sqrt(2 ln n / n_k)`.
pub fn uct_select(stats: &[ArmStats], d1: f64, n: u64) -> Result<usize, BanditError> {
    require_played(stats)?;
    let ln_n = (n as f64).ln();
    Ok(argmax(stats.iter().map(|s| s.mean() + d1 * (2.0 * ln_n / s.plays as f64).sqrt())))
}

/// UCT plus `sqrt((sum x^2 - n_k mean^2 + D3) / n_k)`, the radicand floored at 0.
pub fn sp_mcts_select(stats: &[ArmStats], d2: f64, d3: f64, n: u64) -> Result<usize, BanditError> {
    require_played(stats)?;
    let ln_n = (n as f64).ln();
    Ok(argmax(stats.iter().map(|s| {
        let nk = s.plays as f64;
        let mean = s.mean();
        let spread = ((s.sum_sq - nk * mean * mean + d3) / nk).max(0.0).sqrt();
        mean + d2 * (2.0 * ln_n / nk).sqrt() + spread
    })))
}

/// Empirical CVaR at level `alpha`: mean of the lowest `ceil(n_k alpha)` rewards.
pub fn cvar(sorted_rewards: &[f64], alpha: f64) -> f64 {
    let m = ((sorted_rewards.len() as f64 * alpha).ceil() as usize).clamp(1, sorted_rewards.len());
    sorted_rewards[..m].iter().sum::<f64>() / m as f64
}

/// Best lower confidence bound on CVaR:
/// `CVaR_k - D4 sqrt(ln ceil(n alpha) / ceil(n_k alpha))`.
pub fn marab_select(sorted_stores: &[Vec<f64>], d4: f64, alpha: f64, n: u64) -> Result<usize, BanditError> {
    if sorted_stores.is_empty() {
        return Err(BanditError::NoArms);
    }
    if let Some(k) = sorted_stores.iter().position(|s| s.is_empty()) {
        return Err(BanditError::UnplayedArm(k));
    }
    let ln_n = (n as f64 * alpha).ceil().max(1.0).ln();
    Ok(argmax(sorted_stores.iter().map(|store| {
        let nk = (store.len() as f64 * alpha).ceil().max(1.0);
        cvar(store, alpha) - d4 * (ln_n / nk).sqrt()
    })))
}
