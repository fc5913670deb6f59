//! Random decision forest grown with Gini-impurity split search: fully
//! grown trees, bootstrap ensembling, per-node feature subsets, and
//! class-probability prediction.

mod io;
mod split;

pub use io::{forest_to_json, load_forest, read_forest, save_forest, write_forest};
pub use split::{best_split, gini, Split};

use rand::Rng;

use crate::domain::{ActivityCategory, NUM_CATEGORIES};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, FusionSignature};
use crate::rng::stream_rng;

/// Dense row-major training samples with integer class labels.
#[derive(Debug, Clone)]
pub struct TrainingData {
    dim: usize,
    rows: Vec<f64>,
    labels: Vec<usize>,
}

impl TrainingData {
    pub fn new(dim: usize, rows: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("feature dimension must be positive".into()));
        }
        if rows.len() != dim * labels.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: dim * labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= NUM_CATEGORIES) {
            return Err(Error::Config(format!(
                "label index {bad} out of range 0..{NUM_CATEGORIES}"
            )));
        }
        Ok(TrainingData { dim, rows, labels })
    }

    /// Joins a feature matrix with labeled frames, keeping the given frame
    /// order. Sample order matters for reproducibility: bootstrap draws are
    /// indexed into it.
    pub fn from_features(
        features: &FeatureMatrix,
        labeled: &[(String, ActivityCategory)],
    ) -> Result<Self> {
        let dim = features.dim();
        let mut rows = Vec::with_capacity(dim * labeled.len());
        let mut labels = Vec::with_capacity(labeled.len());
        for (frame_id, label) in labeled {
            let row = features.row(frame_id).ok_or_else(|| Error::MissingFrame {
                frame_id: frame_id.clone(),
                context: format!("{} features", features.role()),
            })?;
            rows.extend_from_slice(row);
            labels.push(label.index());
        }
        TrainingData::new(dim, rows, labels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    fn value(&self, i: usize, feature: usize) -> f64 {
        self.rows[i * self.dim + feature]
    }

    fn label(&self, i: usize) -> usize {
        self.labels[i]
    }
}

/// Per-node feature subset size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxFeatures {
    /// floor(sqrt(dim)), at least 1.
    Sqrt,
    /// Consider every feature at every node.
    All,
    /// A fixed count (capped at dim).
    Fixed(usize),
}

impl MaxFeatures {
    fn resolve(self, dim: usize) -> Result<usize> {
        let k = match self {
            MaxFeatures::Sqrt => (dim as f64).sqrt().floor() as usize,
            MaxFeatures::All => dim,
            MaxFeatures::Fixed(0) => {
                return Err(Error::Config("max_features must be positive".into()))
            }
            MaxFeatures::Fixed(k) => k.min(dim),
        };
        Ok(k.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestConfig {
    pub n_estimators: usize,
    /// Depth cap; `None` grows every tree until its leaves are pure.
    pub max_depth: Option<usize>,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub rng_seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_estimators: 100,
            max_depth: None,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            rng_seed: 0,
        }
    }
}

/// A binary decision tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        class_counts: [u64; NUM_CATEGORIES],
    },
    Internal {
        feature_index: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    /// Walks the tree; `row[feature] <= threshold` goes left.
    fn leaf_counts(&self, row: &[f64]) -> &[u64; NUM_CATEGORIES] {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { class_counts } => return class_counts,
                TreeNode::Internal {
                    feature_index,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature_index] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

/// A trained forest together with everything needed to reproduce and apply
/// it: configuration, feature dimension, the fusion signature of its input
/// vector, and the window length it was trained on (1 = per-frame).
#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<TreeNode>,
    pub config: ForestConfig,
    pub feature_dim: usize,
    pub fusion_signature: FusionSignature,
    pub timestep: usize,
    pub realized_max_depth: usize,
}

impl ForestModel {
    /// Mean of the trees' leaf class distributions; always a valid
    /// probability vector.
    pub fn predict_proba(&self, row: &[f64]) -> Result<[f64; NUM_CATEGORIES]> {
        if row.len() != self.feature_dim {
            return Err(Error::Dimension {
                context: "predict_proba input".to_string(),
                expected: self.feature_dim,
                got: row.len(),
            });
        }
        let mut acc = [0.0; NUM_CATEGORIES];
        for tree in &self.trees {
            let counts = tree.leaf_counts(row);
            let total: u64 = counts.iter().sum();
            let total = total as f64;
            for (a, &c) in acc.iter_mut().zip(counts.iter()) {
                *a += c as f64 / total;
            }
        }
        let n_trees = self.trees.len() as f64;
        for a in acc.iter_mut() {
            *a /= n_trees;
        }
        Ok(acc)
    }

    /// Argmax of `predict_proba`, ties broken toward the lowest index.
    pub fn predict(&self, row: &[f64]) -> Result<ActivityCategory> {
        let proba = self.predict_proba(row)?;
        Ok(argmax_category(&proba))
    }
}

/// Lowest-index argmax over a score vector.
pub fn argmax_category(scores: &[f64; NUM_CATEGORIES]) -> ActivityCategory {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    ActivityCategory::from_index(best).unwrap()
}

/// Trains `n_estimators` trees, each on its own bootstrap resample (when
/// enabled) with a per-node random feature subset. Tree `t` draws from a
/// generator derived from `(rng_seed, t)`, so results do not depend on
/// whether trees are grown sequentially or in parallel.
pub fn train_forest(
    data: &TrainingData,
    config: &ForestConfig,
    fusion_signature: FusionSignature,
    timestep: usize,
) -> Result<ForestModel> {
    if config.n_estimators == 0 {
        return Err(Error::Config("n_estimators must be positive".into()));
    }
    if data.is_empty() {
        return Err(Error::Config("training set is empty".into()));
    }
    if data.len() < 2 {
        return Err(Error::Config(
            "training a forest requires at least 2 samples".into(),
        ));
    }
    if let Some(0) = config.max_depth {
        return Err(Error::Config("max_depth must be positive".into()));
    }
    let subset_size = config.max_features.resolve(data.dim())?;

    let mut trees = Vec::with_capacity(config.n_estimators);
    for t in 0..config.n_estimators {
        let mut rng = stream_rng(config.rng_seed, t as u64);
        let indices: Vec<usize> = if config.bootstrap {
            (0..data.len())
                .map(|_| rng.gen_range(0..data.len()))
                .collect()
        } else {
            (0..data.len()).collect()
        };
        trees.push(grow_tree(data, indices, subset_size, config.max_depth, 0, &mut rng));
    }

    let realized_max_depth = trees.iter().map(TreeNode::depth).max().unwrap_or(0);
    Ok(ForestModel {
        trees,
        config: config.clone(),
        feature_dim: data.dim(),
        fusion_signature,
        timestep,
        realized_max_depth,
    })
}

fn grow_tree(
    data: &TrainingData,
    indices: Vec<usize>,
    subset_size: usize,
    max_depth: Option<usize>,
    depth: usize,
    rng: &mut impl Rng,
) -> TreeNode {
    let mut class_counts = [0u64; NUM_CATEGORIES];
    for &i in &indices {
        class_counts[data.label(i)] += 1;
    }
    let n_present = class_counts.iter().filter(|&&c| c > 0).count();
    let depth_capped = max_depth.is_some_and(|d| depth >= d);
    if n_present <= 1 || depth_capped || indices.len() < 2 {
        return TreeNode::Leaf { class_counts };
    }

    let subset = sample_feature_subset(data.dim(), subset_size, rng);
    let Some(split) = split::best_split(data, &indices, &subset) else {
        // No impurity-decreasing split (e.g. duplicate rows with mixed
        // labels): the leaf stays impure.
        return TreeNode::Leaf { class_counts };
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .into_iter()
        .partition(|&i| data.value(i, split.feature_index) <= split.threshold);

    let left = grow_tree(data, left_idx, subset_size, max_depth, depth + 1, rng);
    let right = grow_tree(data, right_idx, subset_size, max_depth, depth + 1, rng);
    TreeNode::Internal {
        feature_index: split.feature_index,
        threshold: split.threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Draws `k` distinct feature indices (ascending, so the split tie-break
/// stays well-defined). When `k == dim` no randomness is consumed.
fn sample_feature_subset(dim: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    if k >= dim {
        return (0..dim).collect();
    }
    let mut pool: Vec<usize> = (0..dim).collect();
    for i in 0..k {
        let j = rng.gen_range(i..dim);
        pool.swap(i, j);
    }
    let mut subset = pool[..k].to_vec();
    subset.sort_unstable();
    subset
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signature(dim: usize) -> FusionSignature {
        vec![(crate::features::FeatureRole::Embedding, dim)]
    }

    fn plain_config(n_estimators: usize, seed: u64) -> ForestConfig {
        ForestConfig {
            n_estimators,
            max_depth: None,
            max_features: MaxFeatures::All,
            bootstrap: false,
            rng_seed: seed,
        }
    }

    #[test]
    fn single_stump_matches_best_split() {
        let data = TrainingData::new(1, vec![1.0, 2.0, 3.0, 4.0], vec![0, 0, 1, 1]).unwrap();
        let model = train_forest(&data, &plain_config(1, 0), signature(1), 1).unwrap();
        match &model.trees[0] {
            TreeNode::Internal {
                feature_index,
                threshold,
                left,
                right,
            } => {
                assert_eq!(*feature_index, 0);
                assert_eq!(*threshold, 2.5);
                assert!(matches!(**left, TreeNode::Leaf { .. }));
                assert!(matches!(**right, TreeNode::Leaf { .. }));
            }
            other => panic!("expected a stump, got {other:?}"),
        }
        assert_eq!(model.realized_max_depth, 1);
    }

    #[test]
    fn zero_estimators_is_a_config_error() {
        let data = TrainingData::new(1, vec![1.0, 2.0], vec![0, 1]).unwrap();
        assert!(matches!(
            train_forest(&data, &plain_config(0, 0), signature(1), 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn stump_predicts_one_hot_class_zero_below_threshold() {
        let data = TrainingData::new(1, vec![1.0, 2.0, 3.0, 4.0], vec![0, 0, 1, 1]).unwrap();
        let model = train_forest(&data, &plain_config(1, 0), signature(1), 1).unwrap();
        let proba = model.predict_proba(&[1.7]).unwrap();
        assert_eq!(proba[0], 1.0);
        assert!(proba[1..].iter().all(|&p| p == 0.0));
        assert_eq!(model.predict(&[1.7]).unwrap().index(), 0);
    }

    #[test]
    fn averaging_and_tie_break() {
        // Two pure-leaf "trees" voting for categories 3 and 5.
        let leaf = |cat: usize| {
            let mut counts = [0u64; NUM_CATEGORIES];
            counts[cat] = 4;
            TreeNode::Leaf { class_counts: counts }
        };
        let model = ForestModel {
            trees: vec![leaf(3), leaf(5)],
            config: plain_config(2, 0),
            feature_dim: 1,
            fusion_signature: signature(1),
            timestep: 1,
            realized_max_depth: 0,
        };
        let proba = model.predict_proba(&[0.0]).unwrap();
        assert_eq!(proba[3], 0.5);
        assert_eq!(proba[5], 0.5);
        assert_eq!(model.predict(&[0.0]).unwrap().index(), 3);
    }

    #[test]
    fn single_pure_leaf_tree_is_one_hot() {
        let mut counts = [0u64; NUM_CATEGORIES];
        counts[3] = 7;
        let model = ForestModel {
            trees: vec![TreeNode::Leaf { class_counts: counts }],
            config: plain_config(1, 0),
            feature_dim: 2,
            fusion_signature: signature(2),
            timestep: 1,
            realized_max_depth: 0,
        };
        let proba = model.predict_proba(&[0.0, 0.0]).unwrap();
        assert_eq!(proba[3], 1.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let data = TrainingData::new(2, vec![1.0, 0.0, 2.0, 1.0], vec![0, 1]).unwrap();
        let model = train_forest(&data, &plain_config(1, 0), signature(2), 1).unwrap();
        assert!(matches!(
            model.predict_proba(&[1.0]),
            Err(Error::Dimension { expected: 2, got: 1, .. })
        ));
    }

    #[test]
    fn separable_blobs_are_memorized_with_pure_leaves() {
        // 40 distinct points in two well-separated 2-D blobs, seed 7.
        let mut rng = stream_rng(7, 0);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..40 {
            let class = i % 2;
            let offset = if class == 0 { 0.0 } else { 10.0 };
            rows.push(offset + rng.gen::<f64>());
            rows.push(offset + rng.gen::<f64>());
            labels.push(class);
        }
        let data = TrainingData::new(2, rows, labels.clone()).unwrap();
        let model = train_forest(&data, &plain_config(5, 7), signature(2), 1).unwrap();
        for i in 0..40 {
            assert_eq!(model.predict(data.row(i)).unwrap().index(), labels[i]);
        }
        fn all_leaves_pure(node: &TreeNode) -> bool {
            match node {
                TreeNode::Leaf { class_counts } => {
                    class_counts.iter().filter(|&&c| c > 0).count() == 1
                }
                TreeNode::Internal { left, right, .. } => {
                    all_leaves_pure(left) && all_leaves_pure(right)
                }
            }
        }
        assert!(model.trees.iter().all(all_leaves_pure));
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let mut rng = stream_rng(3, 0);
        let rows: Vec<f64> = (0..60).map(|_| rng.gen::<f64>()).collect();
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let data = TrainingData::new(2, rows, labels).unwrap();
        let config = ForestConfig {
            n_estimators: 8,
            rng_seed: 11,
            ..ForestConfig::default()
        };
        let a = train_forest(&data, &config, signature(2), 1).unwrap();
        let b = train_forest(&data, &config, signature(2), 1).unwrap();
        assert_eq!(a, b);
        let c = train_forest(
            &data,
            &ForestConfig {
                rng_seed: 12,
                ..config
            },
            signature(2),
            1,
        )
        .unwrap();
        assert_ne!(a, c);
    }
}
