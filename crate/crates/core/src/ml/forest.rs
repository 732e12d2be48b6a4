//! Random forest of CART trees (Gini impurity, bootstrap samples).
//!
//! Tree `t` draws from its own stream keyed by `seed + t`, so the model is
//! the same whatever the thread count.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Candidate features per split; `None` means `ceil(sqrt(p))`.
    pub features_per_split: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 12,
            min_leaf: 2,
            features_per_split: None,
        }
    }
}

impl ForestParams {
    fn validate(&self) -> Result<()> {
        if self.n_trees == 0 || self.max_depth == 0 || self.min_leaf == 0 || self.features_per_split == Some(0) {
            return Err(Error::InvalidParameter(format!("forest parameters must be positive: {self:?}")));
        }
        Ok(())
    }

    pub fn split_features(&self, p: usize) -> usize {
        self.features_per_split
            .unwrap_or_else(|| (p as f64).sqrt().ceil() as usize)
            .clamp(1, p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// `[P(class 0), P(class 1)]`.
    Leaf { proba: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { proba } => return proba[1],
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub params: ForestParams,
    pub seed: u64,
    pub n_features: usize,
    pub trees: Vec<Tree>,
}

fn gini(n0: f64, n1: f64) -> f64 {
    let n = n0 + n1;
    if n == 0.0 {
        return 0.0;
    }
    let (a, b) = (n0 / n, n1 / n);
    1.0 - a * a - b * b
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [u8],
    params: ForestParams,
    m: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn leaf(&mut self, rows: &[usize]) -> usize {
        let n1 = rows.iter().filter(|&&r| self.y[r] == 1).count() as f64;
        let p1 = n1 / rows.len() as f64;
        self.nodes.push(Node::Leaf { proba: [1.0 - p1, p1] });
        self.nodes.len() - 1
    }

    /// Best `(feature, threshold, impurity)` among the sampled features.
    fn best_split(&self, rows: &[usize], rng: &mut ChaCha8Rng) -> Option<(usize, f64)> {
        let p = self.x[0].len();
        let min_leaf = self.params.min_leaf;
        let total1 = rows.iter().filter(|&&r| self.y[r] == 1).count() as f64;
        let total0 = rows.len() as f64 - total1;
        let parent = gini(total0, total1);
        let mut best: Option<(usize, f64, f64)> = None;
        let mut sorted = rows.to_vec();
        for feature in sample(rng, p, self.m).into_iter() {
            sorted.sort_by(|&a, &b| self.x[a][feature].total_cmp(&self.x[b][feature]));
            let (mut l0, mut l1) = (0.0, 0.0);
            for k in 0..sorted.len() - 1 {
                if self.y[sorted[k]] == 1 {
                    l1 += 1.0;
                } else {
                    l0 += 1.0;
                }
                let (a, b) = (self.x[sorted[k]][feature], self.x[sorted[k + 1]][feature]);
                if a == b {
                    continue;
                }
                let n_left = k + 1;
                if n_left < min_leaf || sorted.len() - n_left < min_leaf {
                    continue;
                }
                let (r0, r1) = (total0 - l0, total1 - l1);
                let n = sorted.len() as f64;
                let impurity = (n_left as f64 * gini(l0, l1) + (n - n_left as f64) * gini(r0, r1)) / n;
                if impurity < parent && best.is_none_or(|(_, _, bi)| impurity < bi) {
                    let mid = a + (b - a) / 2.0;
                    let threshold = if mid < b { mid } else { a };
                    best = Some((feature, threshold, impurity));
                }
            }
        }
        best.map(|(f, t, _)| (f, t))
    }

    fn grow(&mut self, rows: &[usize], depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let n1 = rows.iter().filter(|&&r| self.y[r] == 1).count();
        let pure = n1 == 0 || n1 == rows.len();
        if pure || depth >= self.params.max_depth || rows.len() < 2 * self.params.min_leaf {
            return self.leaf(rows);
        }
        let Some((feature, threshold)) = self.best_split(rows, rng) else {
            return self.leaf(rows);
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| self.x[r][feature] <= threshold);
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { proba: [0.0, 0.0] });
        let left = self.grow(&left_rows, depth + 1, rng);
        let right = self.grow(&right_rows, depth + 1, rng);
        self.nodes[at] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        at
    }
}

fn fit_tree(x: &[Vec<f64>], y: &[u8], params: ForestParams, seed: u64) -> Tree {
    let mut rng = stream(seed, 0, Purpose::Forest);
    let n = x.len();
    let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut b = Builder {
        x,
        y,
        params,
        m: params.split_features(x[0].len()),
        nodes: Vec::new(),
    };
    b.grow(&rows, 0, &mut rng);
    Tree { nodes: b.nodes }
}

fn check_matrix(x: &[Vec<f64>], p: usize) -> Result<()> {
    if let Some(r) = x.iter().find(|r| r.len() != p) {
        return Err(Error::LengthMismatch(p, r.len()));
    }
    Ok(())
}

/// Fit `params.n_trees` trees; labels are 0/1.
pub fn forest_fit(x: &[Vec<f64>], y: &[u8], params: &ForestParams, seed: u64) -> Result<ForestModel> {
    params.validate()?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() || x[0].is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    check_matrix(x, x[0].len())?;
    if y.iter().any(|&c| c > 1) {
        return Err(Error::InvalidParameter("labels must be 0 or 1".into()));
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(Error::SingleClass);
    }
    let trees = (0..params.n_trees as u64)
        .into_par_iter()
        .map(|t| fit_tree(x, y, *params, seed.wrapping_add(t)))
        .collect();
    Ok(ForestModel {
        params: *params,
        seed,
        n_features: x[0].len(),
        trees,
    })
}

impl ForestModel {
    /// Mean class-1 leaf probability over trees, per row.
    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        check_matrix(x, self.n_features)?;
        Ok(x.iter()
            .map(|r| self.trees.iter().map(|t| t.predict_proba(r)).sum::<f64>() / self.trees.len() as f64)
            .collect())
    }

    /// Class 1 when the probability is at least one half.
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<u8>> {
        Ok(self.predict_proba(x)?.into_iter().map(|p| u8::from(p >= 0.5)).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

pub fn accuracy(pred: &[u8], y: &[u8]) -> f64 {
    pred.iter().zip(y).filter(|(a, b)| a == b).count() as f64 / y.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d() -> (Vec<Vec<f64>>, Vec<u8>) {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![if i < 20 { -5.0 - i as f64 } else { 5.0 + i as f64 }]).collect();
        let y = (0..40).map(|i| u8::from(i >= 20)).collect();
        (x, y)
    }

    #[test]
    fn separable_training_accuracy() {
        let (x, y) = one_d();
        let f = forest_fit(&x, &y, &ForestParams::default(), 7).unwrap();
        assert_eq!(accuracy(&f.predict(&x).unwrap(), &y), 1.0);
        assert!(f.predict_proba(&[vec![-10.0]]).unwrap()[0] <= 0.1);
        assert!(f.predict_proba(&[vec![30.0]]).unwrap()[0] >= 0.9);
    }

    #[test]
    fn deterministic_serialization() {
        let (x, y) = one_d();
        let p = ForestParams {
            n_trees: 10,
            ..ForestParams::default()
        };
        let a = forest_fit(&x, &y, &p, 3).unwrap().to_json().unwrap();
        let b = forest_fit(&x, &y, &p, 3).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn model_invariants() {
        let x: Vec<Vec<f64>> = (0..60).map(|i| vec![(i as f64 * 0.37).sin(), (i % 7) as f64]).collect();
        let y: Vec<u8> = (0..60).map(|i| u8::from((i as f64 * 0.37).sin() + (i % 7) as f64 * 0.1 > 0.2)).collect();
        let f = forest_fit(&x, &y, &ForestParams::default(), 11).unwrap();
        for t in &f.trees {
            for n in &t.nodes {
                match n {
                    Node::Leaf { proba } => assert!((proba[0] + proba[1] - 1.0).abs() < 1e-12),
                    Node::Split { feature, threshold, .. } => {
                        let lo = x.iter().map(|r| r[*feature]).fold(f64::INFINITY, f64::min);
                        let hi = x.iter().map(|r| r[*feature]).fold(f64::NEG_INFINITY, f64::max);
                        assert!(*threshold >= lo && *threshold < hi);
                    }
                }
            }
        }
        let single = forest_fit(&x, &y, &ForestParams { n_trees: 1, ..ForestParams::default() }, 2).unwrap();
        let row = &x[5];
        assert_eq!(single.predict_proba(&[row.clone()]).unwrap()[0], single.trees[0].predict_proba(row));
    }

    #[test]
    fn errors() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(matches!(forest_fit(&x, &[1, 1], &ForestParams::default(), 0), Err(Error::SingleClass)));
        let f = forest_fit(&x, &[0, 1], &ForestParams::default(), 0).unwrap();
        assert!(f.predict_proba(&[vec![1.0, 2.0]]).is_err());
    }
}
