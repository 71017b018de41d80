use indexmap::IndexMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{RegressionTree, ValueError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionForest {
    pub trees: Vec<RegressionTree>,
    pub percentile: f64,
}

impl RegressionForest {
    /// Fits `n_trees` trees on the full data set (no bootstrap). Rows with
    /// identical features are first reduced to their largest target. Tree `i`
    /// draws its feature subsets from stream `i` of `seed`.
    pub fn fit(x: &[Vec<f64>], y: &[f64], n_trees: usize, percentile: f64, seed: u64) -> Result<Self, ValueError> {
        if x.is_empty() {
            return Err(ValueError::EmptyTrainingSet);
        }
        if x.len() != y.len() {
            return Err(ValueError::DimensionMismatch { expected: x.len(), found: y.len() });
        }
        let d = x[0].len();
        if let Some(row) = x.iter().find(|r| r.len() != d) {
            return Err(ValueError::DimensionMismatch { expected: d, found: row.len() });
        }
        let (x, y) = collapse_duplicates(x.to_vec(), y.to_vec());
        let max_features = ((d as f64).sqrt() as usize).max(1);
        let trees = (0..n_trees)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                RegressionTree::fit(&x, &y, max_features, &mut rng)
            })
            .collect();
        Ok(RegressionForest { trees, percentile })
    }

    pub fn tree_outputs(&self, x: &[f64]) -> Vec<f64> {
        self.trees.iter().map(|t| t.predict(x)).collect()
    }

    /// Nearest-rank percentile of the per-tree predictions.
    pub fn predict(&self, x: &[f64]) -> Result<f64, ValueError> {
        if self.trees.is_empty() {
            return Err(ValueError::UntrainedForest);
        }
        Ok(nearest_rank(self.tree_outputs(x), self.percentile))
    }
}

/// The `ceil(k/100 * n)`-th smallest value (at least the first).
pub fn nearest_rank(mut values: Vec<f64>, k: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let rank = ((k / 100.0 * values.len() as f64).ceil() as usize).clamp(1, values.len());
    values[rank - 1]
}

/// Collapses rows with identical features to one row carrying the largest target.
pub fn collapse_duplicates(x: Vec<Vec<f64>>, y: Vec<f64>) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut merged: IndexMap<Vec<u64>, (Vec<f64>, f64)> = IndexMap::with_capacity(x.len());
    for (row, target) in x.into_iter().zip(y) {
        // `+ 0.0` maps -0.0 to 0.0, which splits cannot tell apart anyway.
        let key = row.iter().map(|v| (v + 0.0).to_bits()).collect();
        merged.entry(key).and_modify(|(_, t)| *t = t.max(target)).or_insert((row, target));
    }
    merged.into_values().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_of_one_to_hundred() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(nearest_rank(v.clone(), 5.0), 5.0);
        assert_eq!(nearest_rank(v.clone(), 0.0), 1.0);
        assert_eq!(nearest_rank(v, 100.0), 100.0);
    }

    #[test]
    fn constant_forest() {
        let x = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let forest = RegressionForest::fit(&x, &[5000.0, 5000.0], 10, 5.0, 3).unwrap();
        assert_eq!(forest.predict(&[0.3, 0.3]).unwrap(), 5000.0);
    }

    #[test]
    fn duplicates_take_maximum() {
        let (x, y) = collapse_duplicates(vec![vec![1.0], vec![2.0], vec![1.0]], vec![5.0, 1.0, 7.0]);
        assert_eq!(x, vec![vec![1.0], vec![2.0]]);
        assert_eq!(y, vec![7.0, 1.0]);
        let forest = RegressionForest::fit(&x, &y, 20, 5.0, 0).unwrap();
        assert_eq!(forest.predict(&[1.0]).unwrap(), 7.0);
    }

    #[test]
    fn signed_zeros_collapse_together() {
        let (x, y) = collapse_duplicates(vec![vec![0.0], vec![-0.0]], vec![1.0, 2.0]);
        assert_eq!(x.len(), 1);
        assert_eq!(y, vec![2.0]);
    }

    #[test]
    fn empty_training_set() {
        assert!(matches!(RegressionForest::fit(&[], &[], 3, 5.0, 0), Err(ValueError::EmptyTrainingSet)));
        let empty = RegressionForest { trees: vec![], percentile: 5.0 };
        assert!(matches!(empty.predict(&[1.0]), Err(ValueError::UntrainedForest)));
    }

    #[test]
    fn seeded_fit_is_reproducible() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 % 3.0, i as f64 % 5.0, i as f64 % 7.0]).collect();
        let y: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let a = RegressionForest::fit(&x, &y, 8, 5.0, 11).unwrap();
        let b = RegressionForest::fit(&x, &y, 8, 5.0, 11).unwrap();
        assert_eq!(a, b);
    }
}
