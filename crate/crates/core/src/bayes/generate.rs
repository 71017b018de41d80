//! Noisy-OR / Noisy-AND CPT generators.

use super::{BayesError, Cpt, NodeId, DEFAULT_MAX_PARENTS};

/// `P(Pass | parents) = 1 - (1 - leak) * prod_{i: parent i Pass} (1 - w_i)`.
pub fn noisy_or_table(leak: f64, weights: &[f64]) -> Result<Vec<f64>, BayesError> {
    check_inputs(leak, weights)?;
    Ok(rows(weights.len())
        .map(|pass| {
            let inhibit: f64 = weights.iter().zip(&pass).filter(|(_, &p)| p).map(|(w, _)| 1.0 - w).product();
            1.0 - (1.0 - leak) * inhibit
        })
        .collect())
}

/// `P(Pass | parents) = all_pass * prod_{i: parent i Fail} (1 - w_i)`.
pub fn noisy_and_table(all_pass: f64, weights: &[f64]) -> Result<Vec<f64>, BayesError> {
    check_inputs(all_pass, weights)?;
    Ok(rows(weights.len())
        .map(|pass| {
            let keep: f64 = weights.iter().zip(&pass).filter(|(_, &p)| !p).map(|(w, _)| 1.0 - w).product();
            all_pass * keep
        })
        .collect())
}

pub fn noisy_or_cpt(parents: Vec<NodeId>, leak: f64, weights: &[f64]) -> Result<Cpt, BayesError> {
    check_arity(&parents, weights)?;
    Ok(Cpt::new(parents, noisy_or_table(leak, weights)?))
}

pub fn noisy_and_cpt(parents: Vec<NodeId>, all_pass: f64, weights: &[f64]) -> Result<Cpt, BayesError> {
    check_arity(&parents, weights)?;
    Ok(Cpt::new(parents, noisy_and_table(all_pass, weights)?))
}

fn check_arity(parents: &[NodeId], weights: &[f64]) -> Result<(), BayesError> {
    if parents.len() != weights.len() {
        return Err(BayesError::ArityMismatch { parents: parents.len(), weights: weights.len() });
    }
    Ok(())
}

fn check_inputs(base: f64, weights: &[f64]) -> Result<(), BayesError> {
    if weights.len() > DEFAULT_MAX_PARENTS {
        return Err(BayesError::TooManyParents { count: weights.len(), cap: DEFAULT_MAX_PARENTS });
    }
    if let Some(bad) = std::iter::once(&base).chain(weights).find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(BayesError::ProbabilityOutOfRange(*bad));
    }
    Ok(())
}

/// Parent Pass-flags for each row, in row order (last parent least significant).
fn rows(k: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << k).map(move |row| (0..k).map(|i| (row >> (k - 1 - i)) & 1 == 1).collect())
}
