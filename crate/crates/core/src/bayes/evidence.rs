use serde::{Deserialize, Serialize};

use super::{BayesError, NodeId};

/// Binary node state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn is_pass(self) -> bool {
        matches!(self, Outcome::Pass)
    }
}

/// Soft evidence on a node, stored scaled so the larger component is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Likelihood {
    pass: f64,
    fail: f64,
}

impl Likelihood {
    pub const IDENTITY: Likelihood = Likelihood { pass: 1.0, fail: 1.0 };

    pub fn new(pass: f64, fail: f64) -> Result<Self, BayesError> {
        let valid = |x: f64| x.is_finite() && x >= 0.0;
        if !valid(pass) || !valid(fail) || (pass == 0.0 && fail == 0.0) {
            return Err(BayesError::InvalidLikelihood { pass, fail });
        }
        let scale = pass.max(fail);
        Ok(Likelihood { pass: pass / scale, fail: fail / scale })
    }

    pub fn pass(&self) -> f64 {
        self.pass
    }

    pub fn fail(&self) -> f64 {
        self.fail
    }

    /// Composition of two independent soft findings on the same node.
    pub fn combine(&self, other: &Likelihood) -> Result<Likelihood, BayesError> {
        Likelihood::new(self.pass * other.pass, self.fail * other.fail)
    }
}

impl TryFrom<[f64; 2]> for Likelihood {
    type Error = BayesError;

    fn try_from(value: [f64; 2]) -> Result<Self, Self::Error> {
        Likelihood::new(value[0], value[1])
    }
}

impl From<Likelihood> for [f64; 2] {
    fn from(l: Likelihood) -> Self {
        [l.pass, l.fail]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvidenceItem {
    /// Observed VA result.
    Hard { node: NodeId, state: Outcome },
    /// Likelihood finding, e.g. the effect of a correction activity.
    Virtual { node: NodeId, likelihood: Likelihood },
}

impl EvidenceItem {
    pub fn node(&self) -> NodeId {
        match *self {
            EvidenceItem::Hard { node, .. } | EvidenceItem::Virtual { node, .. } => node,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn likelihood_is_scale_invariant() {
        let a = Likelihood::new(0.9, 0.1).unwrap();
        let b = Likelihood::new(9.0, 1.0).unwrap();
        assert_eq!(a.pass(), 1.0);
        assert_eq!(b.pass(), 1.0);
        assert!((a.fail() - b.fail()).abs() < 1e-15);
    }

    #[test]
    fn zero_likelihood_pair_rejected() {
        assert!(Likelihood::new(0.0, 0.0).is_err());
        assert!(Likelihood::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn combine_multiplies() {
        let a = Likelihood::new(1.0, 0.5).unwrap();
        let c = a.combine(&a).unwrap();
        assert_eq!(c.fail(), 0.25);
    }
}
