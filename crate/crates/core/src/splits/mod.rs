//! Dataset partitioning: stratified k-fold plans with nested validation
//! splits, and a day-level train/test optimizer that minimizes the summed
//! Bhattacharyya distance between each side and the global label
//! distribution.

mod io;

pub use io::{
    load_day_split, load_fold_plan, save_day_split, save_fold_plan, write_day_split,
    write_fold_plan,
};

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{distribution_from_counts, DatasetManifest, NUM_CATEGORIES};
use crate::error::{Error, Result};

const DISTRIBUTION_SUM_TOLERANCE: f64 = 1e-6;

/// Maximum day count for exhaustive subset enumeration.
pub const EXHAUSTIVE_DAY_CAP: usize = 24;

/// Bhattacharyya distance -ln(sum(sqrt(p_c * q_c))) between two discrete
/// distributions. Zero iff p == q; +inf on disjoint support.
pub fn bhattacharyya(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    for (name, dist) in [("first", p), ("second", q)] {
        if dist.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::NotADistribution(format!(
                "{name} argument has a negative or non-finite entry"
            )));
        }
        let sum: f64 = dist.iter().sum();
        if (sum - 1.0).abs() > DISTRIBUTION_SUM_TOLERANCE {
            return Err(Error::NotADistribution(format!(
                "{name} argument sums to {sum}"
            )));
        }
    }
    Ok(bhattacharyya_unchecked(p, q))
}

fn bhattacharyya_unchecked(p: &[f64], q: &[f64]) -> f64 {
    let coefficient: f64 = p.iter().zip(q.iter()).map(|(&a, &b)| (a * b).sqrt()).sum();
    if coefficient <= 0.0 {
        f64::INFINITY
    } else {
        // The coefficient is mathematically <= 1; clamp rounding residue so
        // identical distributions report exactly zero.
        (-coefficient.ln()).max(0.0)
    }
}

/// One train/validation/test partition of the frame ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: BTreeSet<String>,
    pub validation: BTreeSet<String>,
    pub test: BTreeSet<String>,
}

/// A stratified k-fold plan with a nested validation split per fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    pub k: usize,
    pub validation_fraction: f64,
    pub rng_seed: u64,
    pub folds: Vec<Fold>,
}

/// Builds k stratified folds. Each category's frames are shuffled once with
/// the seeded generator and dealt to the k test sets in near-equal slices;
/// the leftover frames (count mod k) go to whichever test folds are
/// currently smallest, so fold sizes stay within one frame of each other.
/// Each fold's validation set takes a stratified fraction of its training
/// portion, apportioned per category by largest remainder against the
/// global distribution. Deterministic given the seed.
pub fn stratified_folds(
    manifest: &DatasetManifest,
    k: usize,
    validation_fraction: f64,
    rng_seed: u64,
) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    if !(0.0..1.0).contains(&validation_fraction) {
        return Err(Error::Config(format!(
            "validation_fraction must be in [0, 1), got {validation_fraction}"
        )));
    }

    let mut per_category: Vec<Vec<&str>> = vec![Vec::new(); NUM_CATEGORIES];
    for f in manifest.frames() {
        per_category[f.label.index()].push(&f.frame_id);
    }
    for (c, frames) in per_category.iter().enumerate() {
        if !frames.is_empty() && frames.len() < k {
            return Err(Error::CategoryTooSmall {
                category: crate::domain::CATEGORY_NAMES[c].to_string(),
                count: frames.len(),
                k,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for frames in per_category.iter_mut() {
        frames.shuffle(&mut rng);
    }

    // Per-category, per-fold test quotas: floor(n/k) everywhere, with each
    // category's remainder dealt one-per-fold. Target fold sizes are fixed
    // up front (floor(N/k), first N mod k folds one larger); extras go to
    // the folds with the most remaining slack toward their target, so no
    // fold collects every category's remainder.
    let total = manifest.len();
    let base_total: usize = per_category.iter().map(|f| f.len() / k).sum();
    let mut slack: Vec<usize> = (0..k)
        .map(|f| total / k + usize::from(f < total % k) - base_total)
        .collect();
    let mut quotas: Vec<Vec<usize>> = Vec::with_capacity(NUM_CATEGORIES);
    for frames in &per_category {
        let base = frames.len() / k;
        let extra = frames.len() % k;
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&f| (std::cmp::Reverse(slack[f]), f));
        let mut quota = vec![base; k];
        for &f in order.iter().take(extra) {
            quota[f] += 1;
            slack[f] = slack[f].saturating_sub(1);
        }
        quotas.push(quota);
    }

    // Slice each category's shuffled list into consecutive test blocks.
    let mut test_assignment: Vec<Vec<usize>> = Vec::with_capacity(NUM_CATEGORIES);
    for (c, frames) in per_category.iter().enumerate() {
        let mut assignment = vec![0usize; frames.len()];
        let mut offset = 0;
        for fold_index in 0..k {
            for a in assignment.iter_mut().skip(offset).take(quotas[c][fold_index]) {
                *a = fold_index;
            }
            offset += quotas[c][fold_index];
        }
        test_assignment.push(assignment);
    }

    let mut folds = Vec::with_capacity(k);
    for fold_index in 0..k {
        let mut fold = Fold {
            train: BTreeSet::new(),
            validation: BTreeSet::new(),
            test: BTreeSet::new(),
        };
        let mut rest: Vec<Vec<&str>> = vec![Vec::new(); NUM_CATEGORIES];
        for (c, frames) in per_category.iter().enumerate() {
            for (j, id) in frames.iter().enumerate() {
                if test_assignment[c][j] == fold_index {
                    fold.test.insert(id.to_string());
                } else {
                    rest[c].push(id);
                }
            }
        }
        let category_totals: Vec<usize> = per_category.iter().map(Vec::len).collect();
        let val_counts = apportion_validation(
            &rest,
            &category_totals,
            manifest.len(),
            validation_fraction,
        );
        for (c, ids) in rest.into_iter().enumerate() {
            for (j, id) in ids.into_iter().enumerate() {
                if j < val_counts[c] {
                    fold.validation.insert(id.to_string());
                } else {
                    fold.train.insert(id.to_string());
                }
            }
        }
        folds.push(fold);
    }

    Ok(FoldPlan {
        k,
        validation_fraction,
        rng_seed,
        folds,
    })
}

/// Per-category validation counts for one fold. Each count is chosen inside
/// the window where both the validation set and the remaining train set
/// stay within one frame of their share of the global distribution, then
/// counts are nudged (deterministically) until they sum to the rounded
/// validation total.
fn apportion_validation(
    rest: &[Vec<&str>],
    category_totals: &[usize],
    dataset_total: usize,
    fraction: f64,
) -> Vec<usize> {
    let rest_total: usize = rest.iter().map(Vec::len).sum();
    let target = (rest_total as f64 * fraction).round() as usize;
    let train_total = rest_total - target;

    let n = dataset_total as f64;
    let mut lo = vec![0usize; rest.len()];
    let mut hi = vec![0usize; rest.len()];
    let mut center = vec![0.0; rest.len()];
    for (c, ids) in rest.iter().enumerate() {
        let r = ids.len() as f64;
        let val_share = category_totals[c] as f64 * target as f64 / n;
        let train_share = category_totals[c] as f64 * train_total as f64 / n;
        let from_train = r - train_share; // value keeping train within 0 of its share
        let low = (val_share.max(from_train) - 1.0 - 1e-9).ceil().max(0.0);
        let high = (val_share.min(from_train) + 1.0 + 1e-9).floor().min(r);
        lo[c] = low as usize;
        hi[c] = (high.max(low)) as usize;
        center[c] = (val_share + from_train) / 2.0;
    }

    let mut counts: Vec<usize> = (0..rest.len())
        .map(|c| (center[c].round() as usize).clamp(lo[c], hi[c]))
        .collect();
    let mut sum: usize = counts.iter().sum();
    // Nudge toward the target inside the windows, spending the moves on the
    // categories whose current count is farthest from its center.
    while sum != target {
        let mut best: Option<(f64, usize)> = None;
        for c in 0..counts.len() {
            let room = if sum < target {
                counts[c] < hi[c]
            } else {
                counts[c] > lo[c]
            };
            if !room {
                continue;
            }
            let gain = if sum < target {
                center[c] - counts[c] as f64
            } else {
                counts[c] as f64 - center[c]
            };
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, c));
            }
        }
        match best {
            Some((_, c)) => {
                if sum < target {
                    counts[c] += 1;
                    sum += 1;
                } else {
                    counts[c] -= 1;
                    sum -= 1;
                }
            }
            // Windows exhausted (cannot happen with k >= 2 in practice);
            // fall back to padding wherever capacity remains.
            None => {
                let mut adjusted = false;
                for (c, ids) in rest.iter().enumerate() {
                    if sum < target && counts[c] < ids.len() {
                        counts[c] += 1;
                        sum += 1;
                        adjusted = true;
                        break;
                    }
                    if sum > target && counts[c] > 0 {
                        counts[c] -= 1;
                        sum -= 1;
                        adjusted = true;
                        break;
                    }
                }
                if !adjusted {
                    break;
                }
            }
        }
    }
    counts
}

/// Checks the fold-plan invariants against a manifest: the three sets
/// partition the frames, and each set's per-category counts stay within one
/// frame of the best integer stratification (the rounded share of the
/// global distribution).
pub fn verify_fold_plan(plan: &FoldPlan, manifest: &DatasetManifest) -> Result<()> {
    let total = manifest.len();
    let global = crate::domain::label_counts(manifest.frames());
    for (i, fold) in plan.folds.iter().enumerate() {
        let claimed = fold.train.len() + fold.validation.len() + fold.test.len();
        if claimed != total {
            return Err(Error::Config(format!(
                "fold {i}: sets cover {claimed} of {total} frames"
            )));
        }
        let mut seen = BTreeSet::new();
        for set in [&fold.train, &fold.validation, &fold.test] {
            for id in set {
                if !seen.insert(id.as_str()) {
                    return Err(Error::Config(format!(
                        "fold {i}: frame {id:?} appears in two sets"
                    )));
                }
            }
        }
        for (name, set) in [
            ("train", &fold.train),
            ("validation", &fold.validation),
            ("test", &fold.test),
        ] {
            let mut counts = [0u64; NUM_CATEGORIES];
            for f in manifest.frames() {
                if set.contains(&f.frame_id) {
                    counts[f.label.index()] += 1;
                }
            }
            for c in 0..NUM_CATEGORIES {
                let share = global[c] as f64 * set.len() as f64 / total as f64;
                if (counts[c] as f64 - share.round()).abs() > 1.0 + 1e-9 {
                    return Err(Error::Config(format!(
                        "fold {i} {name}: category {:?} has {} frames, expected about {share:.2}",
                        crate::domain::CATEGORY_NAMES[c],
                        counts[c]
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A (user_id, day_id) pair naming one recording day.
pub type DayKey = (String, String);

/// A whole-days train/test partition with its Bhattacharyya objective.
#[derive(Debug, Clone, PartialEq)]
pub struct DaySplitPlan {
    pub train_days: BTreeSet<DayKey>,
    pub test_days: BTreeSet<DayKey>,
    /// bhattacharyya(global, train) + bhattacharyya(global, test).
    pub objective: f64,
    pub target_test_fraction: f64,
    pub fraction_tolerance: f64,
    pub mode: String,
}

/// Search strategy for the day-split optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Enumerates every candidate subset; refuses above
    /// [`EXHAUSTIVE_DAY_CAP`] days.
    Exhaustive,
    /// Greedy beam search over day additions; an approximation for large
    /// day counts.
    Beam(usize),
}

struct DayInfo {
    key: DayKey,
    counts: [u64; NUM_CATEGORIES],
    frames: u64,
}

/// Picks the test-day subset whose frame count is within
/// `fraction_tolerance` of `target_test_fraction` and whose summed
/// Bhattacharyya distance to the global distribution (over both sides) is
/// minimal. Ties go to the lexicographically smallest sorted test-day list.
pub fn optimize_day_split(
    manifest: &DatasetManifest,
    target_test_fraction: f64,
    fraction_tolerance: f64,
    mode: SearchMode,
) -> Result<DaySplitPlan> {
    if !(target_test_fraction > 0.0 && target_test_fraction < 1.0) {
        return Err(Error::Config(format!(
            "target_test_fraction must be in (0, 1), got {target_test_fraction}"
        )));
    }
    if fraction_tolerance <= 0.0 {
        return Err(Error::Config(format!(
            "fraction_tolerance must be positive, got {fraction_tolerance}"
        )));
    }

    let days = collect_days(manifest);
    if days.len() < 2 {
        return Err(Error::Config(format!(
            "day-split optimization needs at least 2 days, got {}",
            days.len()
        )));
    }
    let total_counts = crate::domain::label_counts(manifest.frames());
    let total_frames: u64 = total_counts.iter().sum();
    let global = distribution_from_counts(&total_counts);

    let evaluate = |mask: &[bool]| -> (f64, f64) {
        let mut test_counts = [0u64; NUM_CATEGORIES];
        let mut test_frames = 0u64;
        for (day, &in_test) in days.iter().zip(mask.iter()) {
            if in_test {
                for c in 0..NUM_CATEGORIES {
                    test_counts[c] += day.counts[c];
                }
                test_frames += day.frames;
            }
        }
        let mut train_counts = [0u64; NUM_CATEGORIES];
        for c in 0..NUM_CATEGORIES {
            train_counts[c] = total_counts[c] - test_counts[c];
        }
        let objective = bhattacharyya_unchecked(&global, &distribution_from_counts(&train_counts))
            + bhattacharyya_unchecked(&global, &distribution_from_counts(&test_counts));
        let fraction = test_frames as f64 / total_frames as f64;
        (objective, fraction)
    };

    let feasible =
        |fraction: f64| -> bool { (fraction - target_test_fraction).abs() <= fraction_tolerance };

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut consider = |objective: f64, subset: Vec<usize>| {
        let better = match &best {
            None => true,
            Some((obj, keys)) => {
                objective < *obj || (objective == *obj && subset_lt(&subset, keys))
            }
        };
        if better {
            best = Some((objective, subset));
        }
    };

    match mode {
        SearchMode::Exhaustive => {
            if days.len() > EXHAUSTIVE_DAY_CAP {
                return Err(Error::TooManyDays {
                    days: days.len(),
                    cap: EXHAUSTIVE_DAY_CAP,
                });
            }
            let d = days.len();
            // All proper non-empty subsets as test candidates.
            for bits in 1..((1u64 << d) - 1) {
                let mask: Vec<bool> = (0..d).map(|i| bits >> i & 1 == 1).collect();
                let (objective, fraction) = evaluate(&mask);
                if feasible(fraction) {
                    let subset: Vec<usize> =
                        (0..d).filter(|&i| mask[i]).collect();
                    consider(objective, subset);
                }
            }
        }
        SearchMode::Beam(width) => {
            if width == 0 {
                return Err(Error::Config("beam width must be positive".into()));
            }
            let d = days.len();
            // States are ascending index lists; extending only past the last
            // index enumerates each subset once.
            let mut states: Vec<Vec<usize>> = vec![Vec::new()];
            while !states.is_empty() {
                let mut scored: Vec<(f64, Vec<usize>)> = Vec::new();
                for state in &states {
                    let from = state.last().map_or(0, |&i| i + 1);
                    for next in from..d {
                        let mut subset = state.clone();
                        subset.push(next);
                        if subset.len() == d {
                            continue;
                        }
                        let mut mask = vec![false; d];
                        for &i in &subset {
                            mask[i] = true;
                        }
                        let (objective, fraction) = evaluate(&mask);
                        if fraction > target_test_fraction + fraction_tolerance {
                            continue;
                        }
                        if feasible(fraction) {
                            consider(objective, subset.clone());
                        }
                        scored.push((objective, subset));
                    }
                }
                scored.sort_by(|a, b| {
                    a.0.total_cmp(&b.0)
                        .then_with(|| if subset_lt(&a.1, &b.1) {
                            std::cmp::Ordering::Less
                        } else {
                            std::cmp::Ordering::Greater
                        })
                });
                scored.truncate(width);
                states = scored.into_iter().map(|(_, s)| s).collect();
            }
        }
    }

    let (objective, subset) = best.ok_or(Error::NoFeasibleSubset {
        target: target_test_fraction,
        tolerance: fraction_tolerance,
    })?;
    let test_set: BTreeSet<usize> = subset.into_iter().collect();
    let mut train_days = BTreeSet::new();
    let mut test_days = BTreeSet::new();
    for (i, day) in days.iter().enumerate() {
        if test_set.contains(&i) {
            test_days.insert(day.key.clone());
        } else {
            train_days.insert(day.key.clone());
        }
    }
    Ok(DaySplitPlan {
        train_days,
        test_days,
        objective,
        target_test_fraction,
        fraction_tolerance,
        mode: match mode {
            SearchMode::Exhaustive => "exhaustive".to_string(),
            SearchMode::Beam(w) => format!("beam({w})"),
        },
    })
}

/// Recomputes a plan's objective from the manifest (the plan-file header can
/// be checked against this).
pub fn day_split_objective(manifest: &DatasetManifest, plan: &DaySplitPlan) -> Result<f64> {
    let mut train_counts = [0u64; NUM_CATEGORIES];
    let mut test_counts = [0u64; NUM_CATEGORIES];
    for segment in manifest.segments() {
        let key = (segment.user_id().to_string(), segment.day_id().to_string());
        let counts = crate::domain::label_counts(segment.frames());
        let target = if plan.test_days.contains(&key) {
            &mut test_counts
        } else if plan.train_days.contains(&key) {
            &mut train_counts
        } else {
            return Err(Error::Config(format!(
                "day ({}, {}) is missing from the split plan",
                segment.user_id(),
                segment.day_id()
            )));
        };
        for c in 0..NUM_CATEGORIES {
            target[c] += counts[c];
        }
    }
    let total = crate::domain::label_counts(manifest.frames());
    let global = distribution_from_counts(&total);
    Ok(
        bhattacharyya_unchecked(&global, &distribution_from_counts(&train_counts))
            + bhattacharyya_unchecked(&global, &distribution_from_counts(&test_counts)),
    )
}

fn collect_days(manifest: &DatasetManifest) -> Vec<DayInfo> {
    // Segments come out sorted by (user_id, day_id) already.
    manifest
        .segments()
        .into_iter()
        .map(|segment| DayInfo {
            key: (segment.user_id().to_string(), segment.day_id().to_string()),
            counts: crate::domain::label_counts(segment.frames()),
            frames: segment.len() as u64,
        })
        .collect()
}

/// Lexicographic order on ascending index lists (indices follow day-key
/// order, so this matches lexicographic order on sorted key lists).
fn subset_lt(a: &[usize], b: &[usize]) -> bool {
    a < b
}
