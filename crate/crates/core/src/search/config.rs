use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SearchError;
use crate::domain::Money;
use crate::value::ForestConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ucbrb1,
    Ucbrb2,
    Uct,
    SpMcts,
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Ucbrb1, Method::Ucbrb2, Method::Uct, Method::SpMcts, Method::MonteCarlo];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Ucbrb1 => "ucbrb1",
            Method::Ucbrb2 => "ucbrb2",
            Method::Uct => "uct",
            Method::SpMcts => "spmcts",
            Method::MonteCarlo => "montecarlo",
        }
    }

    /// Selection rule used while building sample trees; `None` for random search.
    pub fn rule(&self) -> Option<Rule> {
        match self {
            Method::Ucbrb1 | Method::Ucbrb2 => Some(Rule::Ucbrb),
            Method::Uct => Some(Rule::Uct),
            Method::SpMcts => Some(Rule::SpMcts),
            Method::MonteCarlo => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key || (key == "mc" && *m == Method::MonteCarlo))
            .ok_or_else(|| SearchError::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Ucbrb,
    Uct,
    SpMcts,
}

/// Search constants. Money terms inside selection are divided by `d7`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// UCBRB exploration weight.
    pub d6: f64,
    pub d7: f64,
    /// Depth penalty `d8 * floor(m / d9)`.
    pub d8: f64,
    pub d9: usize,
    /// UCT exploration weight.
    pub d1: f64,
    /// SP-MCTS exploration weight and variance inflation (money squared).
    pub d2: f64,
    pub d3: f64,
    /// Monte Carlo trees must stay below this many nodes.
    pub d10: usize,
    /// Sample trees per run.
    pub budget: usize,
    pub trace_every: usize,
    /// First term used for states never backed up.
    pub unknown_value: Money,
    pub seed: u64,
    /// Hard cap on nodes in one sample tree.
    pub max_nodes: usize,
    /// Charge the full failure cost in selection instead of its expectation.
    pub literal_failure_cost: bool,
    /// Monte Carlo attempts per tree before falling back to stopping at the root.
    pub max_retries: usize,
    pub forest: ForestConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            d6: 0.5,
            d7: 20000.0,
            d8: 1.0,
            d9: 50,
            d1: 0.5,
            d2: 0.5,
            d3: 10000.0,
            d10: 50,
            budget: 5000,
            trace_every: 50,
            unknown_value: 0.0,
            seed: 0,
            max_nodes: 5000,
            literal_failure_cost: false,
            max_retries: 100_000,
            forest: ForestConfig::default(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |what: &str| Err(SearchError::InvalidConfig(what.to_string()));
        if !(self.d6 > 0.0 && self.d7 > 0.0 && self.d8 > 0.0) {
            return bad("d6, d7 and d8 must be positive");
        }
        if self.d9 == 0 {
            return bad("d9 must be positive");
        }
        if self.d1 < 0.0 || self.d2 < 0.0 || self.d3 < 0.0 {
            return bad("d1, d2 and d3 must be non-negative");
        }
        if self.trace_every == 0 {
            return bad("trace cadence must be positive");
        }
        if self.max_nodes == 0 || self.d10 < 2 {
            return bad("node caps are too small");
        }
        self.forest.validate().map_err(|e| SearchError::InvalidConfig(e.to_string()))?;
        Ok(())
    }

    /// `d8 * floor(m / d9)`.
    pub fn penalty(&self, m: usize) -> f64 {
        self.d8 * (m / self.d9) as f64
    }
}
