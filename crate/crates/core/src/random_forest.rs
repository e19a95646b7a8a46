//! Random-forest regression: bootstrap-bagged CART trees with per-node random
//! feature subsets.
//!
//! Splits maximize the weighted variance reduction
//! `var(parent) − (n_L/n)·var(left) − (n_R/n)·var(right)` (population
//! variances) over every candidate feature and every midpoint between
//! consecutive distinct feature values. A sample goes left when its value is
//! `<= threshold`. Scores within a relative `1e-12` of the parent variance are
//! ties, resolved toward the lower feature index and then the lower
//! threshold.
//!
//! Tree `k` draws its bootstrap sample and all of its node feature subsets
//! from `Rng::stream(seed, k)`, so a forest is the same whether trees are
//! trained sequentially or in parallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::linalg::Matrix;
use crate::rng::Rng;

/// Relative tolerance for treating two split scores as equal.
pub const SPLIT_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<NodeRecord>", into = "Vec<NodeRecord>")]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

/// One entry of a tree's pre-order node list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NodeRecord {
    Split { feature: usize, threshold: f64 },
    Leaf { value: f64 },
}

impl TreeNode {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    fn max_feature(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split {
                feature, left, right, ..
            } => Some(
                (*feature)
                    .max(left.max_feature().unwrap_or(0))
                    .max(right.max_feature().unwrap_or(0)),
            ),
        }
    }

    pub fn to_preorder(&self) -> Vec<NodeRecord> {
        let mut out = Vec::new();
        fn walk(n: &TreeNode, out: &mut Vec<NodeRecord>) {
            match n {
                TreeNode::Leaf { value } => out.push(NodeRecord::Leaf { value: *value }),
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    out.push(NodeRecord::Split {
                        feature: *feature,
                        threshold: *threshold,
                    });
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn from_preorder(records: &[NodeRecord]) -> Result<Self, String> {
        fn build(records: &[NodeRecord], pos: &mut usize, depth: usize) -> Result<TreeNode, String> {
            if depth > 10_000 {
                return Err("tree too deep".into());
            }
            let rec = records.get(*pos).ok_or("truncated node list")?;
            *pos += 1;
            match *rec {
                NodeRecord::Leaf { value } => {
                    if !value.is_finite() {
                        return Err("non-finite leaf value".into());
                    }
                    Ok(TreeNode::Leaf { value })
                }
                NodeRecord::Split { feature, threshold } => {
                    if !threshold.is_finite() {
                        return Err("non-finite threshold".into());
                    }
                    let left = build(records, pos, depth + 1)?;
                    let right = build(records, pos, depth + 1)?;
                    Ok(TreeNode::Split {
                        feature,
                        threshold,
                        left: Box::new(left),
                        right: Box::new(right),
                    })
                }
            }
        }
        let mut pos = 0;
        let tree = build(records, &mut pos, 0)?;
        if pos != records.len() {
            return Err(format!("{} trailing nodes", records.len() - pos));
        }
        Ok(tree)
    }
}

impl From<TreeNode> for Vec<NodeRecord> {
    fn from(t: TreeNode) -> Self {
        t.to_preorder()
    }
}

impl TryFrom<Vec<NodeRecord>> for TreeNode {
    type Error = String;

    fn try_from(v: Vec<NodeRecord>) -> Result<Self, String> {
        TreeNode::from_preorder(&v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features sampled per node; `None` means ceil(p / 3).
    pub m_try: Option<usize>,
    /// `None` means unlimited.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 200,
            m_try: None,
            max_depth: None,
            min_samples_leaf: 1,
            bootstrap: true,
            seed: 42,
        }
    }
}

impl ForestConfig {
    pub fn resolved_m_try(&self, p: usize) -> Result<usize, ModelError> {
        let m = self.m_try.unwrap_or(p.div_ceil(3));
        if m < 1 || m > p {
            return Err(ModelError::InvalidConfig(format!("m_try = {m} with {p} features")));
        }
        Ok(m)
    }

    fn validate(&self, p: usize) -> Result<usize, ModelError> {
        if self.n_trees == 0 {
            return Err(ModelError::InvalidConfig("n_trees must be at least 1".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(ModelError::InvalidConfig("min_samples_leaf must be at least 1".into()));
        }
        self.resolved_m_try(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    /// Weighted variance reduction.
    pub score: f64,
}

/// Best split of all rows of `x` over the given candidate features.
pub fn best_split(x: &Matrix, y: &[f64], candidate_features: &[usize]) -> Option<SplitCandidate> {
    let samples: Vec<usize> = (0..x.rows()).collect();
    best_split_indexed(x, y, &samples, candidate_features, 1)
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    // Adjacent floats can round the midpoint up to b.
    if m < b {
        m
    } else {
        a
    }
}

fn best_split_indexed(
    x: &Matrix,
    y: &[f64],
    samples: &[usize],
    candidate_features: &[usize],
    min_leaf: usize,
) -> Option<SplitCandidate> {
    let n = samples.len();
    if n < 2 || n < 2 * min_leaf {
        return None;
    }
    let first = y[samples[0]];
    if samples.iter().all(|&i| y[i] == first) {
        return None;
    }
    let nf = n as f64;
    let parent_mean = samples.iter().map(|&i| y[i]).sum::<f64>() / nf;
    let centered_sum: f64 = samples.iter().map(|&i| y[i] - parent_mean).sum();
    let parent_var = samples.iter().map(|&i| (y[i] - parent_mean).powi(2)).sum::<f64>() / nf;
    let tol = SPLIT_TIE_TOL * parent_var;

    let mut features = candidate_features.to_vec();
    features.sort_unstable();
    features.dedup();

    let mut best: Option<SplitCandidate> = None;
    let mut order = samples.to_vec();
    for &f in &features {
        order.sort_by(|&a, &b| x[(a, f)].total_cmp(&x[(b, f)]));
        let mut left_sum = 0.0;
        for k in 1..n {
            left_sum += y[order[k - 1]] - parent_mean;
            let (lo, hi) = (x[(order[k - 1], f)], x[(order[k], f)]);
            if lo == hi || k < min_leaf || n - k < min_leaf {
                continue;
            }
            let right_sum = centered_sum - left_sum;
            let (kl, kr) = (k as f64, (n - k) as f64);
            let score = (left_sum * left_sum / kl + right_sum * right_sum / kr
                - centered_sum * centered_sum / nf)
                / nf;
            let improves = match best {
                None => score > tol,
                Some(b) => score > b.score + tol,
            };
            if improves {
                best = Some(SplitCandidate {
                    feature: f,
                    threshold: midpoint(lo, hi),
                    score,
                });
            }
        }
    }
    best
}

fn leaf_value(y: &[f64], samples: &[usize]) -> f64 {
    let first = y[samples[0]];
    if samples.iter().all(|&i| y[i] == first) {
        first
    } else {
        samples.iter().map(|&i| y[i]).sum::<f64>() / samples.len() as f64
    }
}

/// Grows one tree on all rows of `x`. Feature subsets are drawn from `rng`
/// in pre-order, once per node that reaches the split search.
pub fn fit_tree(x: &Matrix, y: &[f64], config: &ForestConfig, rng: &mut Rng) -> Result<TreeNode, ModelError> {
    let samples: Vec<usize> = (0..x.rows()).collect();
    fit_tree_on(x, y, &samples, config, rng)
}

fn fit_tree_on(
    x: &Matrix,
    y: &[f64],
    samples: &[usize],
    config: &ForestConfig,
    rng: &mut Rng,
) -> Result<TreeNode, ModelError> {
    if x.rows() != y.len() {
        return Err(ModelError::ShapeMismatch(format!("{} rows for {} targets", x.rows(), y.len())));
    }
    if samples.is_empty() || x.cols() == 0 {
        return Err(ModelError::EmptyData);
    }
    let m_try = config.validate(x.cols())?;
    Ok(grow(x, y, samples, config, m_try, 0, rng))
}

fn grow(
    x: &Matrix,
    y: &[f64],
    samples: &[usize],
    config: &ForestConfig,
    m_try: usize,
    depth: usize,
    rng: &mut Rng,
) -> TreeNode {
    let leaf = || TreeNode::Leaf {
        value: leaf_value(y, samples),
    };
    if config.max_depth.is_some_and(|d| depth >= d) || samples.len() < 2 * config.min_samples_leaf {
        return leaf();
    }
    let first = y[samples[0]];
    if samples.iter().all(|&i| y[i] == first) {
        return leaf();
    }
    let candidates = rng.sample_indices(x.cols(), m_try);
    let Some(split) = best_split_indexed(x, y, samples, &candidates, config.min_samples_leaf) else {
        return leaf();
    };
    let (left, right): (Vec<usize>, Vec<usize>) = samples
        .iter()
        .partition(|&&i| x[(i, split.feature)] <= split.threshold);
    let left = grow(x, y, &left, config, m_try, depth + 1, rng);
    let right = grow(x, y, &right, config, m_try, depth + 1, rng);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub n_features: usize,
    pub config: ForestConfig,
    pub trees: Vec<TreeNode>,
    /// Training rows (with repeats) each tree was grown on.
    pub bootstrap_indices: Vec<Vec<usize>>,
}

impl Forest {
    /// Checks the invariants a deserialized forest must satisfy.
    pub fn validate(&self) -> Result<(), String> {
        if self.trees.is_empty() || self.trees.len() != self.config.n_trees {
            return Err(format!("{} trees for n_trees = {}", self.trees.len(), self.config.n_trees));
        }
        if self.bootstrap_indices.len() != self.trees.len() {
            return Err("bootstrap index lists do not match tree count".into());
        }
        for t in &self.trees {
            if t.max_feature().is_some_and(|f| f >= self.n_features) {
                return Err("split on a feature beyond n_features".into());
            }
        }
        Ok(())
    }

    pub fn tree_predictions(&self, row: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_row(row)?;
        Ok(self.trees.iter().map(|t| t.predict(row)).collect())
    }

    fn check_row(&self, row: &[f64]) -> Result<(), ModelError> {
        if row.len() != self.n_features {
            return Err(ModelError::ShapeMismatch(format!(
                "row has {} features, forest expects {}",
                row.len(),
                self.n_features
            )));
        }
        Ok(())
    }
}

pub fn fit_forest(x: &Matrix, y: &[f64], config: &ForestConfig) -> Result<Forest, ModelError> {
    if x.rows() != y.len() {
        return Err(ModelError::ShapeMismatch(format!("{} rows for {} targets", x.rows(), y.len())));
    }
    let n = x.rows();
    if n == 0 || x.cols() == 0 {
        return Err(ModelError::EmptyData);
    }
    config.validate(x.cols())?;
    let grown = (0..config.n_trees)
        .into_par_iter()
        .map(|k| {
            let mut rng = Rng::stream(config.seed, k as u64);
            let rows: Vec<usize> = if config.bootstrap {
                (0..n).map(|_| rng.below_usize(n)).collect()
            } else {
                (0..n).collect()
            };
            let tree = fit_tree_on(x, y, &rows, config, &mut rng)?;
            Ok((tree, rows))
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let (trees, bootstrap_indices) = grown.into_iter().unzip();
    Ok(Forest {
        n_features: x.cols(),
        config: *config,
        trees,
        bootstrap_indices,
    })
}

/// Unweighted mean of the per-tree predictions, summed in tree order.
pub fn predict(forest: &Forest, row: &[f64]) -> Result<f64, ModelError> {
    forest.check_row(row)?;
    let sum: f64 = forest.trees.iter().map(|t| t.predict(row)).sum();
    Ok(sum / forest.trees.len() as f64)
}

pub fn predict_rows(forest: &Forest, x: &Matrix) -> Result<Vec<f64>, ModelError> {
    (0..x.rows()).map(|i| predict(forest, x.row(i))).collect()
}
