use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Flattened regression tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    /// Sum of squared errors of the two children.
    sse: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl RegressionTree {
    /// Grows a variance-reduction tree until every leaf is pure in its targets
    /// or its rows are identical. Each split considers `max_features` randomly
    /// chosen features and falls back to the rest when none of them separates
    /// the rows.
    pub fn fit<R: Rng + ?Sized>(x: &[Vec<f64>], y: &[f64], max_features: usize, rng: &mut R) -> Self {
        assert!(!x.is_empty() && x.len() == y.len());
        let d = x[0].len();
        let mut nodes = vec![TreeNode::Leaf { value: 0.0 }];
        let mut stack = vec![(0usize, (0..x.len()).collect::<Vec<_>>())];
        let mut features: Vec<usize> = (0..d).collect();
        while let Some((slot, rows)) = stack.pop() {
            let pure = rows.iter().all(|&r| y[r] == y[rows[0]]);
            let split = if pure { None } else { best_split(x, y, &rows, &mut features, max_features, rng) };
            match split {
                // A pure leaf stores its target as is; summing repeats can drift by an ulp.
                None if pure => nodes[slot] = TreeNode::Leaf { value: y[rows[0]] },
                None => {
                    let mean = rows.iter().map(|&r| y[r]).sum::<f64>() / rows.len() as f64;
                    nodes[slot] = TreeNode::Leaf { value: mean };
                }
                Some(s) => {
                    let (left, right) = (nodes.len(), nodes.len() + 1);
                    nodes.push(TreeNode::Leaf { value: 0.0 });
                    nodes.push(TreeNode::Leaf { value: 0.0 });
                    nodes[slot] = TreeNode::Split { feature: s.feature, threshold: s.threshold, left, right };
                    stack.push((right, s.right));
                    stack.push((left, s.left));
                }
            }
        }
        RegressionTree { nodes }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split { feature, threshold, left, right } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }
}

fn best_split<R: Rng + ?Sized>(
    x: &[Vec<f64>],
    y: &[f64],
    rows: &[usize],
    features: &mut [usize],
    max_features: usize,
    rng: &mut R,
) -> Option<SplitChoice> {
    features.shuffle(rng);
    let mut best: Option<SplitChoice> = None;
    for (visited, &f) in features.iter().enumerate() {
        if visited >= max_features && best.is_some() {
            break;
        }
        if let Some(s) = split_on(x, y, rows, f) {
            if best.as_ref().is_none_or(|b| s.sse < b.sse) {
                best = Some(s);
            }
        }
    }
    best
}

fn split_on(x: &[Vec<f64>], y: &[f64], rows: &[usize], f: usize) -> Option<SplitChoice> {
    let mut order = rows.to_vec();
    order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
    let n = order.len();
    let (total, total_sq) = order.iter().fold((0.0, 0.0), |(s, q), &r| (s + y[r], q + y[r] * y[r]));
    let mut left_sum = 0.0;
    let mut left_sq = 0.0;
    let mut best: Option<(f64, usize)> = None;
    for i in 0..n - 1 {
        let r = order[i];
        left_sum += y[r];
        left_sq += y[r] * y[r];
        let (a, b) = (x[r][f], x[order[i + 1]][f]);
        if a == b {
            continue;
        }
        let nl = (i + 1) as f64;
        let nr = (n - i - 1) as f64;
        let right_sum = total - left_sum;
        let sse = (left_sq - left_sum * left_sum / nl) + ((total_sq - left_sq) - right_sum * right_sum / nr);
        if best.is_none_or(|(s, _)| sse < s) {
            best = Some((sse, i));
        }
    }
    let (sse, i) = best?;
    let (a, b) = (x[order[i]][f], x[order[i + 1]][f]);
    let mut threshold = a + (b - a) / 2.0;
    if threshold >= b {
        threshold = a;
    }
    Some(SplitChoice { feature: f, threshold, sse, left: order[..=i].to_vec(), right: order[i + 1..].to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interpolates_distinct_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![(i % 7) as f64, (i / 7) as f64, 0.5]).collect();
        let y: Vec<f64> = (0..40).map(|i| (i * i) as f64).collect();
        let tree = RegressionTree::fit(&x, &y, 1, &mut rng);
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(tree.predict(xi), *yi);
        }
    }

    #[test]
    fn identical_rows_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = vec![vec![1.0], vec![1.0]];
        let tree = RegressionTree::fit(&x, &[2.0, 4.0], 1, &mut rng);
        assert_eq!(tree.predict(&[1.0]), 3.0);
        assert_eq!(tree.leaf_count(), 1);
    }

    #[test]
    fn pure_leaf_keeps_exact_target() {
        // (0.1 + 0.1 + 0.1) / 3 is one ulp above 0.1.
        let x = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![0.0, 2.0]];
        let tree = RegressionTree::fit(&x, &[0.1; 3], 1, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(tree.leaf_count(), 1);
        assert_eq!(tree.predict(&[0.0, 1.0]), 0.1);
    }

    #[test]
    fn close_values_still_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = 0.1f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let tree = RegressionTree::fit(&[vec![a], vec![b]], &[1.0, 2.0], 1, &mut rng);
        assert_eq!(tree.predict(&[a]), 1.0);
        assert_eq!(tree.predict(&[b]), 2.0);
    }
}
