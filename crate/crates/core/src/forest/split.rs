//! Gini impurity and the CART split search.

use crate::domain::NUM_CATEGORIES;
use crate::error::{Error, Result};

use super::TrainingData;

/// Gini impurity 1 - sum((n_c / N)^2) of a count vector.
pub fn gini(class_counts: &[u64]) -> Result<f64> {
    let total: u64 = class_counts.iter().sum();
    if total == 0 {
        return Err(Error::ZeroCounts);
    }
    Ok(gini_of_counts(class_counts, total))
}

/// Same formula without the zero check; `total` must equal the count sum.
/// Terms are accumulated in class-index order so that independent
/// implementations of the same expression agree bit-for-bit.
pub(crate) fn gini_of_counts(class_counts: &[u64], total: u64) -> f64 {
    let n = total as f64;
    let mut sum_sq = 0.0;
    for &c in class_counts {
        let p = c as f64 / n;
        sum_sq += p * p;
    }
    1.0 - sum_sq
}

/// A chosen split: samples with `row[feature_index] <= threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature_index: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Finds the split over the given feature subset maximizing the weighted
/// impurity decrease. Candidate thresholds are midpoints between consecutive
/// distinct sorted values of each feature. Ties are broken by lowest feature
/// index, then lowest threshold. Returns `None` if no split decreases
/// impurity (e.g. pure node, or no feature with two distinct values).
pub fn best_split(
    data: &TrainingData,
    indices: &[usize],
    feature_subset: &[usize],
) -> Option<Split> {
    let n = indices.len();
    if n < 2 {
        return None;
    }

    let mut parent_counts = [0u64; NUM_CATEGORIES];
    for &i in indices {
        parent_counts[data.label(i)] += 1;
    }
    let parent_gini = gini_of_counts(&parent_counts, n as u64);

    let mut best: Option<Split> = None;
    let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(n);

    for &feature in feature_subset {
        sorted.clear();
        sorted.extend(indices.iter().map(|&i| (data.value(i, feature), data.label(i))));
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left_counts = [0u64; NUM_CATEGORIES];
        for split_at in 1..n {
            left_counts[sorted[split_at - 1].1] += 1;
            let (prev, next) = (sorted[split_at - 1].0, sorted[split_at].0);
            if next <= prev {
                continue;
            }
            let threshold = (prev + next) / 2.0;
            let n_left = split_at as u64;
            let n_right = (n - split_at) as u64;
            let mut right_counts = [0u64; NUM_CATEGORIES];
            for c in 0..NUM_CATEGORIES {
                right_counts[c] = parent_counts[c] - left_counts[c];
            }
            let gain = parent_gini
                - (n_left as f64 / n as f64) * gini_of_counts(&left_counts, n_left)
                - (n_right as f64 / n as f64) * gini_of_counts(&right_counts, n_right);
            let better = match &best {
                None => true,
                Some(b) => gain > b.gain,
            };
            if better {
                best = Some(Split {
                    feature_index: feature,
                    threshold,
                    gain,
                });
            }
        }
    }

    best.filter(|s| s.gain > 0.0)
}
