//! Core data model: the fixed 21-way activity taxonomy, timestamped frames,
//! per-user per-day segments, and the line-oriented manifest format.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Number of activity categories in the taxonomy.
pub const NUM_CATEGORIES: usize = 21;

/// Canonical category names, in index order. Index ↔ name is a bijection.
pub const CATEGORY_NAMES: [&str; NUM_CATEGORIES] = [
    "Public Transport",
    "Driving",
    "Walking outdoor",
    "Walking indoor",
    "Biking",
    "Drinking together",
    "Drinking/eating alone",
    "Eating together",
    "Socializing",
    "Attending a seminar",
    "Meeting",
    "Reading",
    "TV",
    "Cleaning and chores",
    "Working",
    "Cooking",
    "Shopping",
    "Talking",
    "Resting",
    "Mobile",
    "Plane",
];

/// One of the 21 daily-activity categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActivityCategory(u8);

impl ActivityCategory {
    pub fn from_index(index: usize) -> Option<Self> {
        (index < NUM_CATEGORIES).then_some(ActivityCategory(index as u8))
    }

    pub fn from_name(name: &str) -> Option<Self> {
        CATEGORY_NAMES
            .iter()
            .position(|&n| n == name)
            .map(|i| ActivityCategory(i as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        CATEGORY_NAMES[self.index()]
    }

    /// All categories in canonical order.
    pub fn all() -> impl Iterator<Item = ActivityCategory> {
        (0..NUM_CATEGORIES).map(|i| ActivityCategory(i as u8))
    }
}

impl fmt::Display for ActivityCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single timestamped, labeled photo-stream frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameRecord {
    pub frame_id: String,
    pub user_id: String,
    pub day_id: String,
    /// Position within its (user, day), consecutive from 0.
    pub seq_index: usize,
    /// Minutes since midnight, 0..=1439.
    pub timestamp: u16,
    /// Day of week, 0..=6.
    pub weekday: u8,
    pub label: ActivityCategory,
}

/// An ordered view of all frames of one (user, day). Always non-empty; the
/// frames are a contiguous, seq-ordered slice of the owning manifest.
#[derive(Debug, Clone, Copy)]
pub struct DaySegment<'a> {
    frames: &'a [FrameRecord],
}

impl<'a> DaySegment<'a> {
    pub fn user_id(&self) -> &'a str {
        &self.frames[0].user_id
    }

    pub fn day_id(&self) -> &'a str {
        &self.frames[0].day_id
    }

    pub fn frames(&self) -> &'a [FrameRecord] {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A validated dataset: frames grouped by (user, day) and ordered by
/// seq_index within each day. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    frames: Vec<FrameRecord>,
}

impl DatasetManifest {
    /// Validates and normalizes a frame list into a manifest. Frames are
    /// sorted by (user_id, day_id, seq_index); every day must have seq
    /// indices 0..N-1 with strictly increasing timestamps.
    pub fn from_frames(mut frames: Vec<FrameRecord>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::EmptyManifest);
        }
        for f in &frames {
            check_id("frame_id", &f.frame_id)?;
            check_id("user_id", &f.user_id)?;
            check_id("day_id", &f.day_id)?;
            if f.timestamp > 1439 {
                return Err(Error::FieldRange {
                    frame_id: f.frame_id.clone(),
                    msg: format!("timestamp {} not in 0..=1439", f.timestamp),
                });
            }
            if f.weekday > 6 {
                return Err(Error::FieldRange {
                    frame_id: f.frame_id.clone(),
                    msg: format!("weekday {} not in 0..=6", f.weekday),
                });
            }
        }

        let mut ids: Vec<&str> = frames.iter().map(|f| f.frame_id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateFrame {
                frame_id: w[0].to_string(),
            });
        }

        frames.sort_by(|a, b| {
            (&a.user_id, &a.day_id, a.seq_index).cmp(&(&b.user_id, &b.day_id, b.seq_index))
        });

        for day in split_days(&frames) {
            let mut prev: Option<&FrameRecord> = None;
            for (expected, frame) in day.iter().enumerate() {
                if frame.seq_index != expected {
                    return Err(Error::SeqGap {
                        user_id: frame.user_id.clone(),
                        day_id: frame.day_id.clone(),
                        expected,
                        found: frame.seq_index,
                    });
                }
                if let Some(p) = prev {
                    if frame.timestamp <= p.timestamp {
                        return Err(Error::TimestampOrder {
                            frame_id: frame.frame_id.clone(),
                        });
                    }
                }
                prev = Some(frame);
            }
        }

        Ok(DatasetManifest { frames })
    }

    pub fn frames(&self) -> &[FrameRecord] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The declared taxonomy (fixed: all 21 categories).
    pub fn categories(&self) -> impl Iterator<Item = ActivityCategory> {
        ActivityCategory::all()
    }

    /// Day segments in (user_id, day_id) order.
    pub fn segments(&self) -> Vec<DaySegment<'_>> {
        split_days(&self.frames)
            .map(|frames| DaySegment { frames })
            .collect()
    }

    /// frame_id → label lookup for the whole dataset.
    pub fn label_map(&self) -> BTreeMap<String, ActivityCategory> {
        self.frames
            .iter()
            .map(|f| (f.frame_id.clone(), f.label))
            .collect()
    }
}

fn check_id(field: &'static str, value: &str) -> Result<()> {
    if value.is_empty() || value.chars().any(char::is_whitespace) {
        return Err(Error::BadId {
            field,
            value: value.to_string(),
        });
    }
    Ok(())
}

/// Splits a (user, day, seq)-sorted slice into one sub-slice per day.
fn split_days(frames: &[FrameRecord]) -> impl Iterator<Item = &[FrameRecord]> {
    frames.chunk_by(|a, b| a.user_id == b.user_id && a.day_id == b.day_id)
}

/// Per-category frame counts.
pub fn label_counts<'a>(frames: impl IntoIterator<Item = &'a FrameRecord>) -> [u64; NUM_CATEGORIES] {
    let mut counts = [0u64; NUM_CATEGORIES];
    for f in frames {
        counts[f.label.index()] += 1;
    }
    counts
}

/// Normalized label distribution over the 21 categories; entries sum to 1.
pub fn label_distribution(frames: &[FrameRecord]) -> Result<[f64; NUM_CATEGORIES]> {
    if frames.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(distribution_from_counts(&label_counts(frames)))
}

/// Turns nonempty counts into a probability vector.
pub fn distribution_from_counts(counts: &[u64; NUM_CATEGORIES]) -> [f64; NUM_CATEGORIES] {
    let total: u64 = counts.iter().sum();
    let mut dist = [0.0; NUM_CATEGORIES];
    if total > 0 {
        for (d, &c) in dist.iter_mut().zip(counts.iter()) {
            *d = c as f64 / total as f64;
        }
    }
    dist
}

const MANIFEST_HEADER: &str = "frame_id\tuser_id\tday_id\tseq_index\ttimestamp\tweekday\tlabel";

/// Loads a tab-separated manifest file. Lines starting with `#` and blank
/// lines are ignored; the first significant line must be the column header.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text, path)
}

pub(crate) fn parse_manifest(text: &str, path: &Path) -> Result<DatasetManifest> {
    let mut frames = Vec::new();
    let mut saw_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != MANIFEST_HEADER {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("expected header {MANIFEST_HEADER:?}"),
                ));
            }
            saw_header = true;
            continue;
        }
        frames.push(parse_manifest_line(line, path, lineno + 1)?);
    }
    if !saw_header {
        return Err(Error::parse(path, 1, "missing manifest header"));
    }
    DatasetManifest::from_frames(frames)
}

fn parse_manifest_line(line: &str, path: &Path, lineno: usize) -> Result<FrameRecord> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 7 {
        return Err(Error::parse(
            path,
            lineno,
            format!("expected 7 tab-separated fields, got {}", fields.len()),
        ));
    }
    let parse_int = |name: &str, value: &str| -> Result<u64> {
        value
            .parse::<u64>()
            .map_err(|_| Error::parse(path, lineno, format!("invalid {name}: {value:?}")))
    };
    let seq_index = parse_int("seq_index", fields[3])? as usize;
    let timestamp = parse_int("timestamp", fields[4])?;
    let weekday = parse_int("weekday", fields[5])?;
    if timestamp > 1439 {
        return Err(Error::parse(
            path,
            lineno,
            format!("timestamp {timestamp} not in 0..=1439"),
        ));
    }
    if weekday > 6 {
        return Err(Error::parse(
            path,
            lineno,
            format!("weekday {weekday} not in 0..=6"),
        ));
    }
    let label = ActivityCategory::from_name(fields[6]).ok_or_else(|| Error::UnknownLabel {
        frame_id: fields[0].to_string(),
        label: fields[6].to_string(),
    })?;
    Ok(FrameRecord {
        frame_id: fields[0].to_string(),
        user_id: fields[1].to_string(),
        day_id: fields[2].to_string(),
        seq_index,
        timestamp: timestamp as u16,
        weekday: weekday as u8,
        label,
    })
}

/// Writes a manifest in the canonical form: header, then one row per frame
/// in (user_id, day_id, seq_index) order.
pub fn write_manifest(mut w: impl Write, manifest: &DatasetManifest) -> std::io::Result<()> {
    writeln!(w, "{MANIFEST_HEADER}")?;
    for f in manifest.frames() {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            f.frame_id, f.user_id, f.day_id, f.seq_index, f.timestamp, f.weekday, f.label
        )?;
    }
    Ok(())
}

/// Writes a manifest to a file.
pub fn save_manifest(path: impl AsRef<Path>, manifest: &DatasetManifest) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_manifest(&mut buf, manifest).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(id: &str, seq: usize, ts: u16, label: &str) -> FrameRecord {
        FrameRecord {
            frame_id: id.to_string(),
            user_id: "u1".to_string(),
            day_id: "d1".to_string(),
            seq_index: seq,
            timestamp: ts,
            weekday: 2,
            label: ActivityCategory::from_name(label).unwrap(),
        }
    }

    #[test]
    fn taxonomy_is_a_bijection() {
        assert_eq!(CATEGORY_NAMES.len(), NUM_CATEGORIES);
        for (i, name) in CATEGORY_NAMES.iter().enumerate() {
            let cat = ActivityCategory::from_name(name).unwrap();
            assert_eq!(cat.index(), i);
            assert_eq!(cat.name(), *name);
            assert_eq!(ActivityCategory::from_index(i), Some(cat));
        }
        assert_eq!(ActivityCategory::from_index(21), None);
        assert_eq!(ActivityCategory::from_name("Skydiving"), None);
    }

    #[test]
    fn four_line_manifest_builds_one_segment() {
        let text = format!(
            "{MANIFEST_HEADER}\n\
             f0\tu1\td1\t0\t600\t2\tReading\n\
             f1\tu1\td1\t1\t601\t2\tReading\n\
             f2\tu1\td1\t2\t602\t2\tTV\n\
             f3\tu1\td1\t3\t603\t2\tTV\n"
        );
        let manifest = parse_manifest(&text, Path::new("test.tsv")).unwrap();
        let segments = manifest.segments();
        assert_eq!(segments.len(), 1);
        assert_eq!(segments[0].len(), 4);
        assert_eq!(segments[0].user_id(), "u1");
    }

    #[test]
    fn empty_manifest_is_an_error() {
        let err = DatasetManifest::from_frames(vec![]).unwrap_err();
        assert!(matches!(err, Error::EmptyManifest));
        let text = format!("{MANIFEST_HEADER}\n");
        let err = parse_manifest(&text, Path::new("t.tsv")).unwrap_err();
        assert!(matches!(err, Error::EmptyManifest));
    }

    #[test]
    fn seq_gap_names_the_missing_index() {
        let frames = vec![
            frame("f0", 0, 10, "Reading"),
            frame("f1", 1, 11, "Reading"),
            frame("f3", 3, 13, "Reading"),
        ];
        match DatasetManifest::from_frames(frames).unwrap_err() {
            Error::SeqGap {
                expected, found, ..
            } => {
                assert_eq!(expected, 2);
                assert_eq!(found, 3);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn duplicate_frame_id_rejected() {
        let frames = vec![frame("f0", 0, 10, "TV"), {
            let mut f = frame("f0", 1, 11, "TV");
            f.frame_id = "f0".into();
            f
        }];
        assert!(matches!(
            DatasetManifest::from_frames(frames).unwrap_err(),
            Error::DuplicateFrame { .. }
        ));
    }

    #[test]
    fn timestamp_ties_rejected() {
        let frames = vec![frame("f0", 0, 10, "TV"), frame("f1", 1, 10, "TV")];
        assert!(matches!(
            DatasetManifest::from_frames(frames).unwrap_err(),
            Error::TimestampOrder { .. }
        ));
    }

    #[test]
    fn unknown_label_names_the_frame() {
        let text = format!("{MANIFEST_HEADER}\nf0\tu1\td1\t0\t600\t2\tJuggling\n");
        match parse_manifest(&text, Path::new("t.tsv")).unwrap_err() {
            Error::UnknownLabel { frame_id, label } => {
                assert_eq!(frame_id, "f0");
                assert_eq!(label, "Juggling");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn whitespace_in_ids_rejected() {
        let mut f = frame("f0", 0, 10, "TV");
        f.user_id = "user one".into();
        assert!(matches!(
            DatasetManifest::from_frames(vec![f]).unwrap_err(),
            Error::BadId { field: "user_id", .. }
        ));
    }

    #[test]
    fn label_distribution_counts() {
        let frames = vec![
            frame("f0", 0, 10, "Reading"),
            frame("f1", 1, 11, "Reading"),
            frame("f2", 2, 12, "TV"),
            frame("f3", 3, 13, "TV"),
        ];
        let dist = label_distribution(&frames).unwrap();
        let reading = ActivityCategory::from_name("Reading").unwrap().index();
        let tv = ActivityCategory::from_name("TV").unwrap().index();
        assert_eq!(dist[reading], 0.5);
        assert_eq!(dist[tv], 0.5);
        assert_eq!(dist.iter().filter(|&&p| p != 0.0).count(), 2);
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn label_distribution_one_hot_and_thirds() {
        let frames = vec![frame("f0", 0, 10, "Plane"), frame("f1", 1, 11, "Plane")];
        let dist = label_distribution(&frames).unwrap();
        assert_eq!(dist[ActivityCategory::from_name("Plane").unwrap().index()], 1.0);

        let frames = vec![
            frame("f0", 0, 10, "Biking"),
            frame("f1", 1, 11, "Biking"),
            frame("f2", 2, 12, "Talking"),
        ];
        let dist = label_distribution(&frames).unwrap();
        assert!((dist[ActivityCategory::from_name("Biking").unwrap().index()] - 2.0 / 3.0).abs() < 1e-12);
        assert!((dist[ActivityCategory::from_name("Talking").unwrap().index()] - 1.0 / 3.0).abs() < 1e-12);
        assert!(matches!(label_distribution(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn manifest_round_trips_through_text() {
        let frames = vec![
            frame("f0", 0, 10, "Reading"),
            frame("f1", 1, 11, "TV"),
            {
                let mut f = frame("g0", 0, 5, "Cooking");
                f.day_id = "d2".into();
                f
            },
        ];
        let manifest = DatasetManifest::from_frames(frames).unwrap();
        let mut buf = Vec::new();
        write_manifest(&mut buf, &manifest).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let reparsed = parse_manifest(&text, Path::new("t.tsv")).unwrap();
        assert_eq!(reparsed, manifest);
    }

    #[test]
    fn segments_split_on_user_and_day() {
        let mut frames = vec![frame("f0", 0, 10, "TV"), frame("f1", 1, 11, "TV")];
        let mut other = frame("g0", 0, 10, "TV");
        other.user_id = "u2".into();
        frames.push(other);
        let manifest = DatasetManifest::from_frames(frames).unwrap();
        let segments = manifest.segments();
        assert_eq!(segments.len(), 2);
        assert_eq!(segments[0].user_id(), "u1");
        assert_eq!(segments[1].user_id(), "u2");
    }
}
