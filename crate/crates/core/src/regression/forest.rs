//! Bagged regression trees with per-split feature subsampling.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MaxFeatures {
    /// `ceil(d / 3)`
    Third,
    All,
    Count(usize),
}

impl MaxFeatures {
    fn resolve(self, d: usize) -> usize {
        match self {
            MaxFeatures::Third => d.div_ceil(3),
            MaxFeatures::All => d,
            MaxFeatures::Count(m) => m.min(d),
        }
        .max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RfParams {
    pub n_trees: usize,
    pub min_leaf: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
}

impl Default for RfParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            min_leaf: 5,
            max_features: MaxFeatures::Third,
            bootstrap: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                Node::Leaf(v) => return *v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }
}

struct TreeBuilder<'a> {
    rows: &'a [Vec<f64>],
    targets: &'a [f64],
    min_leaf: usize,
    mtry: usize,
    rng: ChaCha8Rng,
}

impl TreeBuilder<'_> {
    fn leaf(&self, idx: &[usize]) -> Node {
        let first = self.targets[idx[0]];
        if idx.iter().all(|&i| self.targets[i] == first) {
            return Node::Leaf(first);
        }
        Node::Leaf(idx.iter().map(|&i| self.targets[i]).sum::<f64>() / idx.len() as f64)
    }

    fn build(&mut self, idx: &mut [usize]) -> Node {
        let n = idx.len();
        let first = self.targets[idx[0]];
        if n < 2 * self.min_leaf || idx.iter().all(|&i| self.targets[i] == first) {
            return self.leaf(idx);
        }
        let d = self.rows[0].len();
        let features = sample(&mut self.rng, d, self.mtry).into_vec();
        let total: f64 = idx.iter().map(|&i| self.targets[i]).sum();
        let parent_score = total * total / n as f64;

        // best (score, feature, threshold); score = sum_L^2/n_L + sum_R^2/n_R
        let mut best: Option<(f64, usize, f64)> = None;
        let mut order = idx.to_vec();
        for &f in &features {
            order.sort_by(|&a, &b| self.rows[a][f].total_cmp(&self.rows[b][f]).then(a.cmp(&b)));
            let mut left_sum = 0.0;
            for pos in 0..n - 1 {
                left_sum += self.targets[order[pos]];
                let n_left = pos + 1;
                let n_right = n - n_left;
                if n_left < self.min_leaf || n_right < self.min_leaf {
                    continue;
                }
                let (lo, hi) = (self.rows[order[pos]][f], self.rows[order[pos + 1]][f]);
                if lo >= hi {
                    continue;
                }
                let right_sum = total - left_sum;
                let score = left_sum * left_sum / n_left as f64 + right_sum * right_sum / n_right as f64;
                if best.is_none_or(|(s, _, _)| score > s) {
                    let mut threshold = 0.5 * (lo + hi);
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some((score, f, threshold));
                }
            }
        }
        let Some((score, feature, threshold)) = best else {
            return self.leaf(idx);
        };
        if score <= parent_score {
            // no variance reduction left
            return self.leaf(idx);
        }
        let split = partition(idx, |i| self.rows[i][feature] <= threshold);
        let (l, r) = idx.split_at_mut(split);
        let left = self.build(l);
        let right = self.build(r);
        Node::Split {
            feature,
            threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

/// Stable partition; returns the count of elements satisfying `pred`.
fn partition(idx: &mut [usize], pred: impl Fn(usize) -> bool) -> usize {
    let (yes, no): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| pred(i));
    let k = yes.len();
    for (slot, v) in idx.iter_mut().zip(yes.into_iter().chain(no)) {
        *slot = v;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Node>,
}

impl Forest {
    pub fn fit(rows: &[Vec<f64>], targets: &[f64], params: &RfParams, seed: u64) -> Result<Self> {
        if params.n_trees == 0 || params.min_leaf == 0 {
            return Err(Error::BadHyperparameter(
                "forest needs n_trees >= 1 and min_leaf >= 1".into(),
            ));
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput("forest training rows"));
        }
        let n = rows.len();
        let mtry = params.max_features.resolve(rows[0].len());
        let trees = (0..params.n_trees)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed::derive_indexed(seed, "tree", t as u64));
                let mut idx: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                let mut builder = TreeBuilder {
                    rows,
                    targets,
                    min_leaf: params.min_leaf,
                    mtry,
                    rng,
                };
                builder.build(&mut idx)
            })
            .collect();
        Ok(Self { trees })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_features_resolution() {
        assert_eq!(MaxFeatures::Third.resolve(27), 9);
        assert_eq!(MaxFeatures::Third.resolve(3), 1);
        assert_eq!(MaxFeatures::Third.resolve(4), 2);
        assert_eq!(MaxFeatures::Count(50).resolve(3), 3);
    }

    #[test]
    fn stable_partition() {
        let mut v = vec![5, 1, 4, 2, 3];
        let k = partition(&mut v, |i| i % 2 == 1);
        assert_eq!(k, 3);
        assert_eq!(v, vec![5, 1, 3, 4, 2]);
    }
}
