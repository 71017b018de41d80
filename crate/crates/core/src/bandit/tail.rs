use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ArmDistribution, BanditError};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailEstimate {
    pub probability: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of `P(max of t draws <= u - eps)`.
pub fn max_tail_probability(
    arm: &ArmDistribution,
    t: usize,
    eps: f64,
    replications: usize,
    seed: u64,
) -> Result<TailEstimate, BanditError> {
    arm.validate()?;
    if replications == 0 {
        return Err(BanditError::NoReplications);
    }
    let level = arm.supremum() - eps;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..replications).filter(|_| (0..t).all(|_| arm.sample(&mut rng) <= level)).count();
    let p = hits as f64 / replications as f64;
    Ok(TailEstimate { probability: p, std_error: (p * (1.0 - p) / replications as f64).sqrt() })
}

/// `exp(-D0 * eps * t)`, the bound the tail probability should stay under.
pub fn exponential_tail_bound(d0: f64, eps: f64, t: usize) -> f64 {
    (-d0 * eps * t as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_tail_matches_closed_form() {
        let arm = ArmDistribution::uniform(0.0, 1.0);
        let est = max_tail_probability(&arm, 5, 0.2, 200_000, 9).unwrap();
        let exact = 0.8f64.powi(5);
        assert!((est.probability - exact).abs() < 4.0 * est.std_error);
        assert!(exact <= exponential_tail_bound(1.0, 0.2, 5));
    }

    #[test]
    fn closed_form_example() {
        assert!((0.9f64.powi(50) - 5.15e-3).abs() < 1e-5);
        assert!(0.9f64.powi(50) <= exponential_tail_bound(1.0, 0.1, 50));
    }
}
