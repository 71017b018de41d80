use crate::bayes::NodeKind;
use crate::domain::{DomainError, Problem, SystemState, VaStatus};

/// Feature vector of a state: parameter confidences, VA status codes
/// (none 0, pass 1, fail 2), CA flags, then the VA and CA counts.
pub fn extract_features(problem: &Problem, state: &SystemState) -> Result<Vec<f64>, DomainError> {
    let beliefs = problem.beliefs(state)?;
    let net = problem.network();
    let mut x = Vec::with_capacity(feature_len(problem));
    x.extend(net.nodes().iter().filter(|n| n.kind == NodeKind::Parameter).map(|n| beliefs[n.id.0]));
    x.extend((0..problem.n_va()).map(|j| match state.va_status(j) {
        VaStatus::None => 0.0,
        VaStatus::Pass => 1.0,
        VaStatus::Fail => 2.0,
    }));
    x.extend((0..problem.n_ca()).map(|k| if state.ca_applied(k) { 1.0 } else { 0.0 }));
    x.push(state.va_count() as f64);
    x.push(state.ca_count() as f64);
    Ok(x)
}

pub fn feature_len(problem: &Problem) -> usize {
    let params = problem.network().nodes().iter().filter(|n| n.kind == NodeKind::Parameter).count();
    params + problem.n_va() + problem.n_ca() + 2
}
