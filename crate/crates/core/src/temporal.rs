//! Sliding-window batch machinery: overlapping window extraction inside day
//! segments, many-to-one feature concatenation, and per-frame aggregation of
//! overlapping window predictions. Windows never cross a day boundary.

use std::collections::BTreeMap;

use crate::domain::{ActivityCategory, DaySegment, NUM_CATEGORIES};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::forest::argmax_category;

/// A fixed-length run of consecutive frames within one (user, day).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub user_id: String,
    pub day_id: String,
    /// seq_index of the first (unpadded) frame covered.
    pub start: usize,
    pub timestep: usize,
    /// Exactly `timestep` entries; short days repeat the day's first frame.
    pub frame_ids: Vec<String>,
}

/// Training-style enumeration: windows start at 0, stride, 2*stride, ...
/// while they fit. A day shorter than the timestep yields one window
/// prefix-padded by repeating its first frame.
pub fn sliding_windows(segment: &DaySegment<'_>, timestep: usize, stride: usize) -> Vec<Window> {
    sliding_windows_opt(segment, timestep, stride, true)
}

/// As [`sliding_windows`], with padding optional; without padding a short
/// day yields no windows.
pub fn sliding_windows_opt(
    segment: &DaySegment<'_>,
    timestep: usize,
    stride: usize,
    pad: bool,
) -> Vec<Window> {
    assert!(timestep >= 1, "timestep must be at least 1");
    assert!(stride >= 1, "stride must be at least 1");
    let frames = segment.frames();
    let n = frames.len();
    if n < timestep {
        if !pad {
            return Vec::new();
        }
        let mut frame_ids = vec![frames[0].frame_id.clone(); timestep - n];
        frame_ids.extend(frames.iter().map(|f| f.frame_id.clone()));
        return vec![Window {
            user_id: segment.user_id().to_string(),
            day_id: segment.day_id().to_string(),
            start: 0,
            timestep,
            frame_ids,
        }];
    }
    let mut windows = Vec::with_capacity((n - timestep) / stride + 1);
    let mut start = 0;
    while start + timestep <= n {
        windows.push(Window {
            user_id: segment.user_id().to_string(),
            day_id: segment.day_id().to_string(),
            start,
            timestep,
            frame_ids: frames[start..start + timestep]
                .iter()
                .map(|f| f.frame_id.clone())
                .collect(),
        });
        start += stride;
    }
    windows
}

/// Evaluation-style enumeration: one window per frame, ending at it, so the
/// window's last step lines up with the frame being scored. The first
/// `timestep - 1` frames get prefix-padded windows (repeating the day's
/// first frame); without padding they get none.
pub fn trailing_windows(segment: &DaySegment<'_>, timestep: usize, pad: bool) -> Vec<Window> {
    assert!(timestep >= 1, "timestep must be at least 1");
    let frames = segment.frames();
    let n = frames.len();
    let mut windows = Vec::new();
    for end in 0..n {
        let (pad_count, first) = if end + 1 >= timestep {
            (0, end + 1 - timestep)
        } else if pad {
            (timestep - end - 1, 0)
        } else {
            continue;
        };
        let mut frame_ids = vec![frames[0].frame_id.clone(); pad_count];
        frame_ids.extend(frames[first..=end].iter().map(|f| f.frame_id.clone()));
        windows.push(Window {
            user_id: segment.user_id().to_string(),
            day_id: segment.day_id().to_string(),
            start: first,
            timestep,
            frame_ids,
        });
    }
    windows
}

/// Concatenates the window's per-frame rows in temporal order; the result
/// has length `timestep * features.dim()`.
pub fn concat_window_features(window: &Window, features: &FeatureMatrix) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(window.timestep * features.dim());
    for frame_id in &window.frame_ids {
        let row = features.row(frame_id).ok_or_else(|| Error::MissingFrame {
            frame_id: frame_id.clone(),
            context: format!("{} features", features.role()),
        })?;
        out.extend_from_slice(row);
    }
    Ok(out)
}

/// The many-to-one training target: the label of the window's last frame.
pub fn many_to_one_label(
    window: &Window,
    labels: &BTreeMap<String, ActivityCategory>,
) -> Result<ActivityCategory> {
    let last = window
        .frame_ids
        .last()
        .expect("windows are never empty");
    labels.get(last).copied().ok_or_else(|| Error::MissingFrame {
        frame_id: last.clone(),
        context: "label map".to_string(),
    })
}

/// Per-frame mean of every probability vector emitted for that frame across
/// covering windows (a frame repeated by padding averages all its
/// emissions). Each frame's emissions are summed in a canonical sorted
/// order, so the result does not depend on the order of the window list.
/// Errors if an expected frame got no prediction.
pub fn aggregate_per_frame(
    window_predictions: &[(Window, Vec<[f64; NUM_CATEGORIES]>)],
    expected_frames: &[String],
) -> Result<BTreeMap<String, [f64; NUM_CATEGORIES]>> {
    let mut emissions: BTreeMap<&str, Vec<&[f64; NUM_CATEGORIES]>> = BTreeMap::new();
    for (window, predictions) in window_predictions {
        if predictions.len() != window.frame_ids.len() {
            return Err(Error::LengthMismatch {
                left: predictions.len(),
                right: window.frame_ids.len(),
            });
        }
        for (frame_id, probs) in window.frame_ids.iter().zip(predictions.iter()) {
            emissions.entry(frame_id).or_default().push(probs);
        }
    }
    let mut result = BTreeMap::new();
    for frame_id in expected_frames {
        let Some(rows) = emissions.get_mut(frame_id.as_str()) else {
            return Err(Error::UncoveredFrame {
                frame_id: frame_id.clone(),
            });
        };
        rows.sort_by(|a, b| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut mean = [0.0; NUM_CATEGORIES];
        for row in rows.iter() {
            for (acc, &p) in mean.iter_mut().zip(row.iter()) {
                *acc += p;
            }
        }
        for m in mean.iter_mut() {
            *m /= rows.len() as f64;
        }
        result.insert(frame_id.clone(), mean);
    }
    Ok(result)
}

/// Final label per frame from aggregated probabilities (lowest-index
/// tie-break).
pub fn label_of(probs: &[f64; NUM_CATEGORIES]) -> ActivityCategory {
    argmax_category(probs)
}
