use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{collapse_duplicates, extract_features, RegressionForest, ValueError};
use crate::domain::{Money, Problem, StrategyTree, SystemState};
use crate::search::{LookupTable, PriorModel, SearchError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub trees: usize,
    /// Percentile of the per-tree outputs used as the prior.
    pub percentile: f64,
    /// Non-terminal sample-tree nodes collected per training period.
    pub period: usize,
    /// Add as many uniform draws from the lookup table as there are buffered nodes.
    pub resample_table: bool,
    /// Train as usual but never hand a prior to the search.
    pub force_absent: bool,
    /// Check after each training that unique training points are reproduced exactly.
    pub check_interpolation: bool,
    /// Write each period's forest as JSON into this directory.
    pub dump_dir: Option<PathBuf>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            trees: 100,
            percentile: 5.0,
            period: 3000,
            resample_table: true,
            force_absent: false,
            check_interpolation: false,
            dump_dir: None,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<(), ValueError> {
        if self.trees == 0 || self.period == 0 || !(0.0..=100.0).contains(&self.percentile) {
            return Err(ValueError::InvalidConfig(format!(
                "trees {} period {} percentile {}",
                self.trees, self.period, self.percentile
            )));
        }
        Ok(())
    }
}

/// What happened in one completed training period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodSummary {
    pub generation: usize,
    /// Sample trees built when the model was swapped in.
    pub after_tree: usize,
    pub buffered: usize,
    pub resampled: usize,
    /// Rows left after collapsing duplicate feature vectors.
    pub training_rows: usize,
    /// Largest |prediction - target| over the training rows, when checked.
    pub max_training_error: Option<f64>,
}

/// Random-forest state-value prior, retrained every `period` buffered nodes.
///
/// Only the latest model is used. Its randomness comes from its own stream,
/// so the search itself draws nothing extra.
pub struct ForestPrior {
    config: ForestConfig,
    seed: u64,
    rng: ChaCha8Rng,
    buffer: Vec<(Vec<f64>, Money)>,
    model: Option<Arc<RegressionForest>>,
    cache: HashMap<SystemState, Money>,
    trees_seen: usize,
    periods: Vec<PeriodSummary>,
    last_training: (Vec<Vec<f64>>, Vec<Money>),
}

const FOREST_STREAM: u64 = 0xf0_2e57;

impl ForestPrior {
    pub fn new(config: ForestConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(FOREST_STREAM);
        ForestPrior {
            config,
            seed,
            rng,
            buffer: Vec::new(),
            model: None,
            cache: HashMap::new(),
            trees_seen: 0,
            periods: Vec::new(),
            last_training: (Vec::new(), Vec::new()),
        }
    }

    pub fn model(&self) -> Option<&RegressionForest> {
        self.model.as_deref()
    }

    pub fn periods(&self) -> &[PeriodSummary] {
        &self.periods
    }

    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    /// Rows of the latest training set before duplicate collapsing.
    pub fn last_training_rows(&self) -> (&[Vec<f64>], &[Money]) {
        (&self.last_training.0, &self.last_training.1)
    }

    fn train(&mut self, problem: &Problem, table: &LookupTable) -> Result<(), ValueError> {
        let buffered = std::mem::take(&mut self.buffer);
        let (mut x, mut y): (Vec<Vec<f64>>, Vec<f64>) = buffered.into_iter().unzip();
        let n_buffered = x.len();
        let mut resampled = 0;
        if self.config.resample_table {
            let known: Vec<(SystemState, Money)> = table
                .iter()
                .filter_map(|(s, e)| e.best.map(|b| (*s, b)))
                .filter(|(s, _)| problem.is_terminal(s).map(|t| t.is_none()).unwrap_or(false))
                .collect();
            if !known.is_empty() {
                for _ in 0..n_buffered {
                    let (state, value) = known[self.rng.random_range(0..known.len())];
                    x.push(extract_features(problem, &state)?);
                    y.push(value);
                    resampled += 1;
                }
            }
        }
        self.last_training = (x.clone(), y.clone());
        let (x, y) = collapse_duplicates(x, y);
        let generation = self.periods.len() + 1;
        let forest_seed = self.seed ^ (generation as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let forest = RegressionForest::fit(&x, &y, self.config.trees, self.config.percentile, forest_seed)?;
        let max_training_error = if self.config.check_interpolation {
            let mut worst = 0.0f64;
            for (xi, yi) in x.iter().zip(&y) {
                worst = worst.max((forest.predict(xi)? - yi).abs());
            }
            Some(worst)
        } else {
            None
        };
        if let Some(dir) = &self.config.dump_dir {
            std::fs::create_dir_all(dir).map_err(|e| ValueError::Io(e.to_string()))?;
            let path = dir.join(format!("forest_period_{generation:03}.json"));
            let text = serde_json::to_string(&forest)?;
            std::fs::write(&path, text).map_err(|e| ValueError::Io(format!("{}: {e}", path.display())))?;
        }
        log::debug!("forest period {generation}: {n_buffered} buffered, {resampled} resampled, {} rows", x.len());
        self.periods.push(PeriodSummary {
            generation,
            after_tree: self.trees_seen,
            buffered: n_buffered,
            resampled,
            training_rows: x.len(),
            max_training_error,
        });
        self.model = Some(Arc::new(forest));
        self.cache.clear();
        Ok(())
    }
}

impl PriorModel for ForestPrior {
    fn prior(&mut self, problem: &Problem, state: &SystemState) -> Result<Option<Money>, SearchError> {
        if self.config.force_absent {
            return Ok(None);
        }
        let Some(model) = &self.model else {
            return Ok(None);
        };
        if let Some(v) = self.cache.get(state) {
            return Ok(Some(*v));
        }
        let x = extract_features(problem, state)?;
        let v = model.predict(&x)?;
        self.cache.insert(*state, v);
        Ok(Some(v))
    }

    fn observe_tree(&mut self, problem: &Problem, tree: &StrategyTree, table: &LookupTable) -> Result<(), SearchError> {
        self.trees_seen += 1;
        for node in tree.nodes() {
            if node.is_leaf() {
                continue;
            }
            let value = node.value.ok_or(crate::domain::DomainError::IncompleteTree)?;
            self.buffer.push((extract_features(problem, &node.state)?, value));
        }
        if self.buffer.len() >= self.config.period {
            self.train(problem, table)?;
        }
        Ok(())
    }
}
