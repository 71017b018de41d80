//! Regret of the max-reward UCB rule against UCT on ten uniform arms, and the
//! running-maximum tail against its exponential bound.
//!
//! ```bash
//! cargo run --release --example bandit_regret
//! ```

use jvcs::bandit::{
    exponential_tail_bound, log_checkpoints, max_tail_probability, simulate_regret, ArmDistribution, D0Mode,
    PolicyConfig, DEFAULT_D0_FLOOR,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arms: Vec<ArmDistribution> = (1..=10).map(|i| ArmDistribution::uniform(0.0, i as f64 / 10.0)).collect();
    let horizon = 20_000;
    let checkpoints = log_checkpoints(100, horizon, 6);
    let policies = [
        ("ucbrb", PolicyConfig::Ucbrb { d0: D0Mode::Estimated { floor: DEFAULT_D0_FLOOR } }),
        ("uct", PolicyConfig::Uct { d1: 0.5 }),
    ];
    for (name, policy) in policies {
        let curve = simulate_regret(&policy, &arms, horizon, 20, 1, &checkpoints)?;
        println!("{name}");
        for p in &curve.points {
            let ratio = p.mean_regret / (p.n as f64).ln();
            println!("  n={:>6}  regret {:>9.2} ± {:>6.2}  regret/ln(n) {ratio:.3}", p.n, p.mean_regret, p.std_error);
        }
    }

    println!("P(max of t Uniform(0,1) draws <= 0.9)");
    let arm = ArmDistribution::uniform(0.0, 1.0);
    for t in [10, 50, 100] {
        let est = max_tail_probability(&arm, t, 0.1, 200_000, t as u64)?;
        println!(
            "  t={t:>3}  estimate {:.3e} ± {:.1e}  exact {:.3e}  bound {:.3e}",
            est.probability,
            est.std_error,
            0.9f64.powi(t as i32),
            exponential_tail_bound(1.0, 0.1, t)
        );
    }
    Ok(())
}
