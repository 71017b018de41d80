//! Built-in scenario templates with seeded Noisy-OR / Noisy-AND CPTs.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::bayes::{noisy_and_cpt, noisy_or_cpt, BayesianNetwork, Cpt, Likelihood, Node, NodeId, NodeKind};
use crate::domain::{CorrectionActivity, Money, Problem, Scenario, Target, VerificationActivity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    /// One parameter, one VA and one prohibitively expensive CA.
    Tiny,
    /// Five parameters, nine VAs, five CAs.
    Small,
    /// Ten parameters, twenty-two VAs, ten CAs.
    Large,
}

impl Template {
    pub fn name(&self) -> &'static str {
        match self {
            Template::Tiny => "tiny",
            Template::Small => "small",
            Template::Large => "large",
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Template {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tiny" => Ok(Template::Tiny),
            "small" => Ok(Template::Small),
            "large" => Ok(Template::Large),
            _ => Err(HarnessError::UnknownTemplate(s.to_string())),
        }
    }
}

pub const REVENUE: Money = 20000.0;
pub const THRESHOLD: f64 = 0.9;

/// Parameter `theta_i` with the indices (1-based) of the parameters it depends on.
const SMALL_PARAMS: &[(u32, &[u32])] = &[(1, &[2, 3]), (2, &[4]), (3, &[5]), (4, &[]), (5, &[])];
const LARGE_PARAMS: &[(u32, &[u32])] = &[
    (1, &[2, 3]),
    (2, &[4, 6]),
    (3, &[5, 9]),
    (4, &[7]),
    (5, &[8, 10]),
    (6, &[]),
    (7, &[]),
    (8, &[]),
    (9, &[]),
    (10, &[]),
];

/// `(id, observed parameter, activity cost, failure cost)`.
const SMALL_VAS: &[(u32, u32, Money, Money)] = &[
    (11, 1, 3300.0, 15000.0),
    (12, 1, 500.0, 8000.0),
    (13, 2, 3300.0, 0.0),
    (14, 3, 3400.0, 0.0),
    (15, 4, 300.0, 0.0),
    (16, 4, 300.0, 0.0),
    (17, 5, 300.0, 0.0),
    (18, 2, 500.0, 0.0),
    (19, 5, 100.0, 0.0),
];
const LARGE_EXTRA_VAS: &[(u32, u32, Money, Money)] = &[
    (20, 1, 3300.0, 12000.0),
    (21, 2, 3400.0, 8000.0),
    (22, 3, 3400.0, 2000.0),
    (23, 6, 300.0, 0.0),
    (24, 4, 2400.0, 10000.0),
    (25, 5, 3500.0, 12000.0),
    (26, 9, 2300.0, 5000.0),
    (27, 7, 2400.0, 0.0),
    (28, 8, 3300.0, 0.0),
    (29, 10, 2300.0, 0.0),
    (30, 6, 400.0, 0.0),
    (31, 9, 300.0, 0.0),
    (32, 10, 400.0, 0.0),
];

/// `(id, cost)`; CA `phi_i` corrects `theta_i`.
const SMALL_CAS: &[(u32, Money)] = &[(1, 8500.0), (2, 5200.0), (3, 2000.0), (4, 2300.0), (5, 1000.0)];
const LARGE_EXTRA_CAS: &[(u32, Money)] = &[(6, 8500.0), (7, 4200.0), (8, 6000.0), (9, 2300.0), (10, 2000.0)];

/// Sampling ranges for the synthetic CPTs. Each field is a half-open `[low, high)` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorSettings {
    /// Prior `P(Pass)` of parameters without parents.
    pub root_prior: (f64, f64),
    /// Noisy-AND `P(Pass)` when every parent passes.
    pub and_all_pass: (f64, f64),
    /// Noisy-AND weight of each failing parent.
    pub and_weight: (f64, f64),
    /// `P(VA passes | parameter Fail)`.
    pub va_false_pass: (f64, f64),
    /// `P(VA passes | parameter Pass)`.
    pub va_true_pass: (f64, f64),
    /// Likelihood of Fail (relative to Pass = 1) attached by a CA.
    pub ca_fail_likelihood: (f64, f64),
}

impl Default for GeneratorSettings {
    fn default() -> Self {
        GeneratorSettings {
            root_prior: (0.70, 0.85),
            and_all_pass: (0.95, 0.99),
            and_weight: (0.5, 0.8),
            va_false_pass: (0.05, 0.25),
            va_true_pass: (0.85, 0.97),
            ca_fail_likelihood: (0.2, 0.5),
        }
    }
}

pub fn generate_scenario(template: Template, seed: u64) -> Result<(BayesianNetwork, Scenario), HarnessError> {
    generate_scenario_with(template, seed, &GeneratorSettings::default())
}

pub fn generate_scenario_with(
    template: Template,
    seed: u64,
    settings: &GeneratorSettings,
) -> Result<(BayesianNetwork, Scenario), HarnessError> {
    match template {
        Template::Tiny => tiny(),
        Template::Small => build("small", SMALL_PARAMS, SMALL_VAS, SMALL_CAS, seed, settings),
        Template::Large => {
            let vas: Vec<_> = SMALL_VAS.iter().chain(LARGE_EXTRA_VAS).copied().collect();
            let cas: Vec<_> = SMALL_CAS.iter().chain(LARGE_EXTRA_CAS).copied().collect();
            build("large", LARGE_PARAMS, &vas, &cas, seed, settings)
        }
    }
}

/// Convenience wrapper returning a ready [`Problem`].
pub fn generate_problem(template: Template, seed: u64) -> Result<Problem, HarnessError> {
    let (net, scenario) = generate_scenario(template, seed)?;
    Ok(Problem::new(net, scenario)?)
}

fn tiny() -> Result<(BayesianNetwork, Scenario), HarnessError> {
    let net = BayesianNetwork::new(vec![
        Node { id: NodeId(0), name: "theta_1".into(), kind: NodeKind::Parameter, cpt: Cpt::prior(0.85) },
        Node {
            id: NodeId(1),
            name: "mu_1".into(),
            kind: NodeKind::Observable,
            cpt: Cpt::new(vec![NodeId(0)], vec![0.2, 0.9]),
        },
    ])?;
    let scenario = Scenario {
        name: "tiny".into(),
        verification_activities: vec![VerificationActivity {
            id: 1,
            name: "mu_1".into(),
            node: NodeId(1),
            activity_cost: 300.0,
            failure_cost: 0.0,
        }],
        correction_activities: vec![CorrectionActivity {
            id: 1,
            name: "phi_1".into(),
            target: NodeId(0),
            activity_cost: REVENUE,
            effect: Likelihood::new(1.0, 0.3)?,
        }],
        targets: vec![Target { parameter: NodeId(0), revenue: REVENUE, threshold: THRESHOLD }],
        max_depth: None,
    };
    Ok((net, scenario))
}

fn build(
    name: &str,
    params: &[(u32, &[u32])],
    vas: &[(u32, u32, Money, Money)],
    cas: &[(u32, Money)],
    seed: u64,
    settings: &GeneratorSettings,
) -> Result<(BayesianNetwork, Scenario), HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |(lo, hi): (f64, f64)| if lo < hi { rng.random_range(lo..hi) } else { lo };
    let param_id = |i: u32| NodeId(i as usize - 1);
    let mut nodes = Vec::new();
    for &(i, parents) in params {
        let cpt = if parents.is_empty() {
            Cpt::prior(draw(settings.root_prior))
        } else {
            let weights: Vec<f64> = parents.iter().map(|_| draw(settings.and_weight)).collect();
            noisy_and_cpt(parents.iter().map(|&p| param_id(p)).collect(), draw(settings.and_all_pass), &weights)?
        };
        nodes.push(Node { id: param_id(i), name: format!("theta_{i}"), kind: NodeKind::Parameter, cpt });
    }
    let mut verification_activities = Vec::new();
    for &(id, theta, cost, fail_cost) in vas {
        let node = NodeId(nodes.len());
        let false_pass = draw(settings.va_false_pass);
        let true_pass = draw(settings.va_true_pass);
        let weight = 1.0 - (1.0 - true_pass) / (1.0 - false_pass);
        let cpt = noisy_or_cpt(vec![param_id(theta)], false_pass, &[weight])?;
        nodes.push(Node { id: node, name: format!("mu_{id}"), kind: NodeKind::Observable, cpt });
        verification_activities.push(VerificationActivity {
            id,
            name: format!("mu_{id}"),
            node,
            activity_cost: cost,
            failure_cost: fail_cost,
        });
    }
    let mut correction_activities = Vec::new();
    for &(id, cost) in cas {
        correction_activities.push(CorrectionActivity {
            id,
            name: format!("phi_{id}"),
            target: param_id(id),
            activity_cost: cost,
            effect: Likelihood::new(1.0, draw(settings.ca_fail_likelihood))?,
        });
    }
    let net = BayesianNetwork::new(nodes)?;
    let scenario = Scenario {
        name: name.to_string(),
        verification_activities,
        correction_activities,
        targets: vec![Target { parameter: param_id(1), revenue: REVENUE, threshold: THRESHOLD }],
        max_depth: None,
    }
    .normalized(&net)?;
    Ok((net, scenario))
}
