use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::policy::{
    estimate_d0, marab_select, sp_mcts_select, ucbrb_select, uct_select, ArmStats, D0Mode, PolicyConfig,
};
use super::{ArmDistribution, BanditError};

/// Mean cumulative regret over replications at one horizon.
#[derive(Debug, Clone, Serialize)]
pub struct RegretPoint {
    pub n: u64,
    pub mean_regret: f64,
    pub std_error: f64,
    /// Average plays per arm.
    pub mean_plays: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegretCurve {
    pub points: Vec<RegretPoint>,
}

impl RegretCurve {
    /// CSV with columns `n,cumulative_regret,std_error,arm_0,..,arm_{k-1}`,
    /// the arm columns holding mean play counts.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let k = self.points.first().map_or(0, |p| p.mean_plays.len());
        let mut header = vec!["n".to_string(), "cumulative_regret".to_string(), "std_error".to_string()];
        header.extend((0..k).map(|i| format!("arm_{i}")));
        w.write_record(&header)?;
        for p in &self.points {
            let mut row = vec![p.n.to_string(), p.mean_regret.to_string(), p.std_error.to_string()];
            row.extend(p.mean_plays.iter().map(|x| x.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// About `count` log-spaced play counts in `[first, horizon]`, always including `horizon`.
pub fn log_checkpoints(first: u64, horizon: u64, count: usize) -> Vec<u64> {
    let first = first.clamp(1, horizon.max(1));
    let mut out = Vec::with_capacity(count + 1);
    let (a, b) = ((first as f64).ln(), (horizon as f64).ln());
    for i in 0..count.max(1) {
        let t = if count <= 1 { 1.0 } else { i as f64 / (count - 1) as f64 };
        let n = (a + t * (b - a)).exp().round() as u64;
        if out.last() != Some(&n) {
            out.push(n);
        }
    }
    if out.last() != Some(&horizon) {
        out.push(horizon);
    }
    out
}

struct Player {
    stats: Vec<ArmStats>,
    stores: Vec<Vec<f64>>,
    window: Option<usize>,
    keep_stores: bool,
}

impl Player {
    fn new(k: usize, policy: &PolicyConfig) -> Self {
        let (keep_stores, window) = match policy {
            PolicyConfig::Marab { window, .. } => (true, *window),
            _ => (false, None),
        };
        Player { stats: vec![ArmStats::default(); k], stores: vec![Vec::new(); k], window, keep_stores }
    }

    fn record(&mut self, arm: usize, x: f64) {
        self.stats[arm].record(x);
        if self.keep_stores {
            let store = &mut self.stores[arm];
            let at = store.partition_point(|&v| v < x);
            store.insert(at, x);
            if let Some(w) = self.window {
                // Bounded memory: drop the largest reward once over the window.
                if store.len() > w {
                    store.pop();
                }
            }
        }
    }

    fn select(&self, policy: &PolicyConfig, n: u64) -> Result<usize, BanditError> {
        match *policy {
            PolicyConfig::Ucbrb { d0: D0Mode::Fixed(d0) } => ucbrb_select(&self.stats, d0, n),
            PolicyConfig::Ucbrb { d0: D0Mode::Estimated { floor } } => {
                let d0 = estimate_d0(&self.stats, floor)?;
                ucbrb_select(&self.stats, d0, n)
            }
            PolicyConfig::Uct { d1 } => uct_select(&self.stats, d1, n),
            PolicyConfig::SpMcts { d2, d3 } => sp_mcts_select(&self.stats, d2, d3, n),
            PolicyConfig::Marab { d4, alpha, .. } => marab_select(&self.stores, d4, alpha, n),
        }
    }
}

/// One run of `horizon` plays. Returns `(regret, plays per arm)` at each checkpoint.
pub fn run_once<R: Rng + ?Sized>(
    policy: &PolicyConfig,
    arms: &[ArmDistribution],
    horizon: u64,
    checkpoints: &[u64],
    rng: &mut R,
) -> Result<Vec<(f64, Vec<u64>)>, BanditError> {
    let k = arms.len();
    let warmup = policy.initial_plays() * k as u64;
    if horizon < warmup {
        return Err(BanditError::HorizonTooShort { horizon, required: warmup });
    }
    let u: Vec<f64> = arms.iter().map(ArmDistribution::supremum).collect();
    let u_star = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut player = Player::new(k, policy);
    let mut regret = 0.0;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for t in 0..horizon {
        let arm = if t < warmup { (t % k as u64) as usize } else { player.select(policy, t)? };
        let x = arms[arm].sample(rng);
        player.record(arm, x);
        regret += u_star - u[arm];
        let n = t + 1;
        while next.peek().is_some_and(|&&c| c == n) {
            next.next();
            out.push((regret, player.stats.iter().map(|s| s.plays).collect()));
        }
    }
    Ok(out)
}

/// Mean regret of `policy` over independent replications, each with its own
/// ChaCha stream derived from `seed`.
pub fn simulate_regret(
    policy: &PolicyConfig,
    arms: &[ArmDistribution],
    horizon: u64,
    replications: usize,
    seed: u64,
    checkpoints: &[u64],
) -> Result<RegretCurve, BanditError> {
    policy.validate()?;
    if arms.is_empty() {
        return Err(BanditError::NoArms);
    }
    for arm in arms {
        arm.validate()?;
    }
    if replications == 0 {
        return Err(BanditError::NoReplications);
    }
    let mut checkpoints: Vec<u64> = checkpoints.iter().copied().filter(|&c| c >= 1 && c <= horizon).collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let runs: Vec<Vec<(f64, Vec<u64>)>> = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep as u64);
            run_once(policy, arms, horizon, &checkpoints, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    let r = replications as f64;
    let points = checkpoints
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let mean = runs.iter().map(|run| run[i].0).sum::<f64>() / r;
            let var = if replications > 1 {
                runs.iter().map(|run| (run[i].0 - mean).powi(2)).sum::<f64>() / (r - 1.0)
            } else {
                0.0
            };
            let mean_plays =
                (0..arms.len()).map(|k| runs.iter().map(|run| run[i].1[k] as f64).sum::<f64>() / r).collect();
            RegretPoint { n, mean_regret: mean, std_error: (var / r).sqrt(), mean_plays }
        })
        .collect();
    Ok(RegretCurve { points })
}
