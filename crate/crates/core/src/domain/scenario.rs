use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DomainError, Money};
use crate::bayes::{BayesianNetwork, Likelihood, NodeId, NodeKind};

/// Observation of one observable node, with its execution and failure costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationActivity {
    pub id: u32,
    pub name: String,
    pub node: NodeId,
    pub activity_cost: Money,
    pub failure_cost: Money,
}

/// Correction of one parameter, modelled as virtual evidence on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionActivity {
    pub id: u32,
    pub name: String,
    pub target: NodeId,
    pub activity_cost: Money,
    /// Likelihood pair `[L_pass, L_fail]`.
    pub effect: Likelihood,
}

/// Revenue earned at a terminal state when the parameter's confidence reaches the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub parameter: NodeId,
    pub revenue: Money,
    pub threshold: f64,
}

/// Activities, costs and value model for one planning problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub verification_activities: Vec<VerificationActivity>,
    pub correction_activities: Vec<CorrectionActivity>,
    pub targets: Vec<Target>,
    /// Optional horizon in time events; unbounded when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
}

/// State encoding packs per-activity flags into 64-bit masks.
pub const MAX_ACTIVITIES: usize = 64;

impl Scenario {
    /// Sorts activities by id and checks the scenario against `net`.
    pub fn normalized(mut self, net: &BayesianNetwork) -> Result<Self, DomainError> {
        self.verification_activities.sort_by_key(|a| a.id);
        self.correction_activities.sort_by_key(|a| a.id);
        self.validate(net)?;
        Ok(self)
    }

    pub fn validate(&self, net: &BayesianNetwork) -> Result<(), DomainError> {
        let invalid = |msg: String| Err(DomainError::InvalidScenario(msg));
        if self.verification_activities.len() > MAX_ACTIVITIES || self.correction_activities.len() > MAX_ACTIVITIES {
            return invalid(format!("at most {MAX_ACTIVITIES} activities of each kind are supported"));
        }
        if self.targets.is_empty() {
            return invalid("no target parameters".into());
        }
        for pair in self.verification_activities.windows(2) {
            if pair[0].id == pair[1].id {
                return invalid(format!("duplicate VA id {}", pair[0].id));
            }
        }
        for pair in self.correction_activities.windows(2) {
            if pair[0].id == pair[1].id {
                return invalid(format!("duplicate CA id {}", pair[0].id));
            }
        }
        for va in &self.verification_activities {
            if net.kind(va.node)? != NodeKind::Observable {
                return invalid(format!("VA {} observes non-observable node {}", va.name, va.node));
            }
            if !(va.activity_cost >= 0.0 && va.failure_cost >= 0.0) {
                return invalid(format!("VA {} has a negative cost", va.name));
            }
        }
        let mut observed: Vec<NodeId> = self.verification_activities.iter().map(|a| a.node).collect();
        observed.sort();
        if observed.windows(2).any(|w| w[0] == w[1]) {
            return invalid("two VAs observe the same node".into());
        }
        for ca in &self.correction_activities {
            if net.kind(ca.target)? != NodeKind::Parameter {
                return invalid(format!("CA {} targets non-parameter node {}", ca.name, ca.target));
            }
            if !(ca.activity_cost >= 0.0) {
                return invalid(format!("CA {} has a negative cost", ca.name));
            }
        }
        for t in &self.targets {
            if net.kind(t.parameter)? != NodeKind::Parameter {
                return invalid(format!("target {} is not a parameter", t.parameter));
            }
            if !(t.threshold > 0.0 && t.threshold <= 1.0) || !(t.revenue >= 0.0) {
                return invalid(format!("target {} has threshold outside (0, 1] or negative revenue", t.parameter));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, DomainError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DomainError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| DomainError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DomainError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| DomainError::Io(format!("{}: {e}", path.display())))
    }
}
