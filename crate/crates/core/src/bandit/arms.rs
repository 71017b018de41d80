use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::BanditError;

/// Reward distribution of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmDistribution {
    Uniform {
        low: f64,
        high: f64,
    },
    /// `high` with probability `p_high`, otherwise `low`.
    BernoulliMixture {
        low: f64,
        high: f64,
        p_high: f64,
    },
    /// Normal(mean, sd) conditioned on `[low, high]`, sampled by rejection.
    TruncatedNormal {
        mean: f64,
        sd: f64,
        low: f64,
        high: f64,
    },
}

impl ArmDistribution {
    pub fn uniform(low: f64, high: f64) -> Self {
        ArmDistribution::Uniform { low, high }
    }

    pub fn validate(&self) -> Result<(), BanditError> {
        let ok = match *self {
            ArmDistribution::Uniform { low, high } => low < high,
            ArmDistribution::BernoulliMixture { low, high, p_high } => low <= high && (0.0..=1.0).contains(&p_high),
            ArmDistribution::TruncatedNormal { mean, sd, low, high } => sd > 0.0 && low < high && mean.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(BanditError::InvalidArm(*self))
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            ArmDistribution::Uniform { low, high }
            | ArmDistribution::BernoulliMixture { low, high, .. }
            | ArmDistribution::TruncatedNormal { low, high, .. } => (low, high),
        }
    }

    /// Reward supremum `u_k`.
    pub fn supremum(&self) -> f64 {
        match *self {
            ArmDistribution::BernoulliMixture { low, high, p_high } => {
                if p_high > 0.0 {
                    high
                } else {
                    low
                }
            }
            _ => self.support().1,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ArmDistribution::Uniform { low, high } => rng.random_range(low..high),
            ArmDistribution::BernoulliMixture { low, high, p_high } => {
                if rng.random_bool(p_high) {
                    high
                } else {
                    low
                }
            }
            ArmDistribution::TruncatedNormal { mean, sd, low, high } => {
                let normal = Normal::new(mean, sd).expect("validated sd");
                loop {
                    let x = normal.sample(rng);
                    if (low..=high).contains(&x) {
                        return x;
                    }
                }
            }
        }
    }

    /// `P(X <= x)` where a closed form is available.
    pub fn cdf(&self, x: f64) -> Option<f64> {
        match *self {
            ArmDistribution::Uniform { low, high } => Some(((x - low) / (high - low)).clamp(0.0, 1.0)),
            ArmDistribution::BernoulliMixture { low, high, p_high } => Some(if x >= high {
                1.0
            } else if x >= low {
                1.0 - p_high
            } else {
                0.0
            }),
            ArmDistribution::TruncatedNormal { .. } => None,
        }
    }
}
