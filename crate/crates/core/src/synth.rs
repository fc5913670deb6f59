//! Synthetic photo-stream generator: a Markov chain over activity
//! categories with per-category feature emission, producing a manifest plus
//! Embedding and Score feature matrices on which the full pipeline can be
//! exercised end to end at desk scale.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{
    ActivityCategory, DatasetManifest, FrameRecord, NUM_CATEGORIES,
};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, FeatureRole};
use crate::rng::{derive_seed, sample_standard_normal, stream_rng};

/// Generator parameters. The label chain stays in its current category with
/// probability `persistence` and otherwise jumps uniformly to one of the
/// other 20; each day starts with a fresh draw from the stationary weights.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamSpec {
    pub n_users: usize,
    pub days_per_user: usize,
    pub frames_per_day: usize,
    /// Self-transition probability, in (0, 1].
    pub persistence: f64,
    /// Per-category Embedding mean vectors (21 x emission_dim).
    pub emission_means: Vec<Vec<f64>>,
    /// Gaussian noise scale for Embedding rows and Score logits.
    pub noise_sigma: f64,
    /// Softmax temperature for Score rows; smaller is closer to one-hot.
    pub score_temperature: f64,
    /// Optional non-uniform stationary weights for the first frame of each
    /// day; uniform when absent.
    pub label_bias: Option<[f64; NUM_CATEGORIES]>,
    pub rng_seed: u64,
}

impl StreamSpec {
    /// A spec with default one-hot-style emission means of the given
    /// dimension.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_users: usize,
        days_per_user: usize,
        frames_per_day: usize,
        persistence: f64,
        emission_dim: usize,
        noise_sigma: f64,
        score_temperature: f64,
        rng_seed: u64,
    ) -> Self {
        StreamSpec {
            n_users,
            days_per_user,
            frames_per_day,
            persistence,
            emission_means: default_emission_means(emission_dim),
            noise_sigma,
            score_temperature,
            label_bias: None,
            rng_seed,
        }
    }

    pub fn emission_dim(&self) -> usize {
        self.emission_means.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 || self.days_per_user == 0 || self.frames_per_day == 0 {
            return Err(Error::Config(
                "users, days_per_user, and frames_per_day must be positive".into(),
            ));
        }
        if self.frames_per_day > 1440 {
            return Err(Error::Config(format!(
                "frames_per_day {} exceeds the 1440 minutes of a day",
                self.frames_per_day
            )));
        }
        if !(self.persistence > 0.0 && self.persistence <= 1.0) {
            return Err(Error::Config(format!(
                "persistence must be in (0, 1], got {}",
                self.persistence
            )));
        }
        let dim = self.emission_dim();
        if dim < 2 {
            return Err(Error::Config(format!(
                "emission dimension must be at least 2, got {dim}"
            )));
        }
        if self.emission_means.len() != NUM_CATEGORIES
            || self.emission_means.iter().any(|m| m.len() != dim)
        {
            return Err(Error::Config(
                "emission_means must be 21 vectors of one shared dimension".into(),
            ));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::Config(format!(
                "noise_sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        if !self.score_temperature.is_finite() || self.score_temperature <= 0.0 {
            return Err(Error::Config(format!(
                "score_temperature must be positive, got {}",
                self.score_temperature
            )));
        }
        if let Some(bias) = &self.label_bias {
            if bias.iter().any(|&w| w < 0.0 || !w.is_finite()) || bias.iter().sum::<f64>() <= 0.0 {
                return Err(Error::Config(
                    "label_bias weights must be non-negative with a positive sum".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Default per-category means: one-hot at `c % dim` (distinct per category
/// whenever dim >= 21), plus a half-strength marker separating wrapped
/// categories when dim < 21.
pub fn default_emission_means(dim: usize) -> Vec<Vec<f64>> {
    (0..NUM_CATEGORIES)
        .map(|c| {
            let mut mean = vec![0.0; dim.max(1)];
            mean[c % dim.max(1)] += 1.0;
            if c >= dim && dim >= 1 {
                mean[(c / dim) % dim] += 0.5;
            }
            mean
        })
        .collect()
}

/// Generates the labeled stream and its two feature matrices. Each (user,
/// day) draws from a generator derived from the spec seed, so output is
/// identical whether days are generated in sequence or in parallel.
pub fn generate(spec: &StreamSpec) -> Result<(DatasetManifest, FeatureMatrix, FeatureMatrix)> {
    spec.validate()?;
    let dim = spec.emission_dim();
    let mut frames = Vec::with_capacity(spec.n_users * spec.days_per_user * spec.frames_per_day);
    let mut embedding = FeatureMatrix::new(FeatureRole::Embedding, dim);
    let mut scores = FeatureMatrix::new(FeatureRole::Score, NUM_CATEGORIES);

    for user_index in 0..spec.n_users {
        let user_id = format!("u{user_index:02}");
        let user_seed = derive_seed(spec.rng_seed, user_index as u64);
        for day_index in 0..spec.days_per_user {
            let day_id = format!("d{day_index:03}");
            let mut rng = stream_rng(user_seed, day_index as u64);
            let weekday = (day_index % 7) as u8;
            let mut label = draw_initial_label(spec, &mut rng);
            for seq_index in 0..spec.frames_per_day {
                if seq_index > 0 {
                    label = transition(label, spec.persistence, &mut rng);
                }
                let frame_id = format!("{user_id}-{day_id}-f{seq_index:04}");

                let mean = &spec.emission_means[label.index()];
                let mut emb: Vec<f64> = Vec::with_capacity(dim);
                for &m in mean {
                    emb.push(m + spec.noise_sigma * sample_standard_normal(&mut rng));
                }
                embedding.insert(frame_id.clone(), emb)?;

                let mut logits = [0.0f64; NUM_CATEGORIES];
                for (k, logit) in logits.iter_mut().enumerate() {
                    let base = if k == label.index() { 1.0 } else { 0.0 };
                    *logit =
                        (base + spec.noise_sigma * sample_standard_normal(&mut rng))
                            / spec.score_temperature;
                }
                scores.insert(frame_id.clone(), softmax_row(&logits))?;

                frames.push(FrameRecord {
                    frame_id,
                    user_id: user_id.clone(),
                    day_id: day_id.clone(),
                    seq_index,
                    timestamp: seq_index as u16,
                    weekday,
                    label,
                });
            }
        }
    }

    let manifest = DatasetManifest::from_frames(frames)?;
    Ok((manifest, embedding, scores))
}

fn draw_initial_label(spec: &StreamSpec, rng: &mut ChaCha8Rng) -> ActivityCategory {
    match &spec.label_bias {
        None => ActivityCategory::from_index(rng.gen_range(0..NUM_CATEGORIES)).unwrap(),
        Some(bias) => {
            let total: f64 = bias.iter().sum();
            let mut draw = rng.gen::<f64>() * total;
            for (c, &w) in bias.iter().enumerate() {
                draw -= w;
                if draw < 0.0 {
                    return ActivityCategory::from_index(c).unwrap();
                }
            }
            ActivityCategory::from_index(NUM_CATEGORIES - 1).unwrap()
        }
    }
}

fn transition(current: ActivityCategory, persistence: f64, rng: &mut ChaCha8Rng) -> ActivityCategory {
    if rng.gen::<f64>() < persistence {
        return current;
    }
    // Uniform over the other 20 categories.
    let mut next = rng.gen_range(0..NUM_CATEGORIES - 1);
    if next >= current.index() {
        next += 1;
    }
    ActivityCategory::from_index(next).unwrap()
}

fn softmax_row(logits: &[f64; NUM_CATEGORIES]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Maximum-likelihood transition matrix from consecutive within-day label
/// pairs. Rows with no outgoing pairs stay zero and are returned as
/// flagged indices.
pub fn empirical_transition_matrix(
    manifest: &DatasetManifest,
) -> Result<([[f64; NUM_CATEGORIES]; NUM_CATEGORIES], Vec<usize>)> {
    let mut counts = [[0u64; NUM_CATEGORIES]; NUM_CATEGORIES];
    let mut any = false;
    for segment in manifest.segments() {
        for pair in segment.frames().windows(2) {
            counts[pair[0].label.index()][pair[1].label.index()] += 1;
            any = true;
        }
    }
    if !any {
        return Err(Error::EmptyInput);
    }
    let mut matrix = [[0.0; NUM_CATEGORIES]; NUM_CATEGORIES];
    let mut flagged = Vec::new();
    for (r, row) in counts.iter().enumerate() {
        let total: u64 = row.iter().sum();
        if total == 0 {
            flagged.push(r);
            continue;
        }
        for (c, &n) in row.iter().enumerate() {
            matrix[r][c] = n as f64 / total as f64;
        }
    }
    Ok((matrix, flagged))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> StreamSpec {
        StreamSpec::new(1, 2, 50, 0.9, 4, 0.1, 0.5, 42)
    }

    #[test]
    fn full_persistence_means_single_category_days() {
        let spec = StreamSpec {
            persistence: 1.0,
            ..StreamSpec::new(2, 3, 30, 1.0, 4, 0.0, 0.5, 7)
        };
        let (manifest, _, _) = generate(&spec).unwrap();
        for segment in manifest.segments() {
            let first = segment.frames()[0].label;
            assert!(segment.frames().iter().all(|f| f.label == first));
        }
        let (matrix, _) = empirical_transition_matrix(&manifest).unwrap();
        for r in 0..NUM_CATEGORIES {
            if matrix[r].iter().sum::<f64>() > 0.0 {
                assert_eq!(matrix[r][r], 1.0);
            }
        }
    }

    #[test]
    fn uniform_persistence_looks_iid() {
        // persistence = 1/21 with uniform off-diagonal mass makes labels
        // i.i.d.: consecutive-equal frequency should sit near 1/21.
        let spec = StreamSpec::new(1, 10, 1400, 1.0 / 21.0, 2, 0.0, 1.0, 3);
        let (manifest, _, _) = generate(&spec).unwrap();
        let mut pairs = 0u64;
        let mut equal = 0u64;
        for segment in manifest.segments() {
            for pair in segment.frames().windows(2) {
                pairs += 1;
                if pair[0].label == pair[1].label {
                    equal += 1;
                }
            }
        }
        assert!(pairs >= 10_000);
        let p = 1.0 / 21.0;
        let rate = equal as f64 / pairs as f64;
        let sigma = (p * (1.0 - p) / pairs as f64).sqrt();
        assert!(
            (rate - p).abs() < 3.0 * sigma,
            "rate {rate}, expected {p} within {}",
            3.0 * sigma
        );
    }

    #[test]
    fn noiseless_low_temperature_scores_are_one_hot() {
        let spec = StreamSpec::new(1, 2, 40, 0.8, 4, 0.0, 1e-6, 9);
        let (manifest, _, scores) = generate(&spec).unwrap();
        for f in manifest.frames() {
            let row = scores.row(&f.frame_id).unwrap();
            let argmax = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            assert_eq!(argmax, f.label.index());
            assert!(row[argmax] > 0.999999);
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let spec = small_spec();
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        assert_eq!(a.2, b.2);
        let c = generate(&StreamSpec {
            rng_seed: 43,
            ..spec
        })
        .unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn persistence_estimate_converges() {
        let spec = StreamSpec::new(2, 10, 600, 0.9, 2, 0.0, 1.0, 11);
        let (manifest, _, _) = generate(&spec).unwrap();
        let transitions: usize = manifest
            .segments()
            .iter()
            .map(|s| s.len() - 1)
            .sum();
        assert!(transitions >= 10_000);
        let (matrix, _) = empirical_transition_matrix(&manifest).unwrap();
        for r in 0..NUM_CATEGORIES {
            let row_sum: f64 = matrix[r].iter().sum();
            if row_sum > 0.0 {
                assert!(
                    (matrix[r][r] - 0.9).abs() <= 0.03,
                    "diagonal {r} = {}",
                    matrix[r][r]
                );
            }
        }
    }

    #[test]
    fn single_day_transition_counts() {
        use crate::domain::DatasetManifest;
        let a = ActivityCategory::from_index(0).unwrap();
        let b = ActivityCategory::from_index(1).unwrap();
        let frames: Vec<FrameRecord> = [a, a, a, b]
            .iter()
            .enumerate()
            .map(|(i, &label)| FrameRecord {
                frame_id: format!("f{i}"),
                user_id: "u1".to_string(),
                day_id: "d1".to_string(),
                seq_index: i,
                timestamp: i as u16,
                weekday: 0,
                label,
            })
            .collect();
        let manifest = DatasetManifest::from_frames(frames).unwrap();
        let (matrix, flagged) = empirical_transition_matrix(&manifest).unwrap();
        assert!((matrix[0][0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((matrix[0][1] - 1.0 / 3.0).abs() < 1e-12);
        assert!(flagged.contains(&1)); // B has no outgoing pair
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = small_spec();
        spec.persistence = 1.2;
        assert!(matches!(generate(&spec), Err(Error::Config(_))));
        let mut spec = small_spec();
        spec.frames_per_day = 0;
        assert!(matches!(generate(&spec), Err(Error::Config(_))));
        let mut spec = small_spec();
        spec.emission_means = default_emission_means(1);
        assert!(matches!(generate(&spec), Err(Error::Config(_))));
    }
}
