use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit's data model, training, and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("empty manifest")]
    EmptyManifest,
    #[error("duplicate frame id {frame_id:?}")]
    DuplicateFrame { frame_id: String },
    #[error("{field} {value:?} must be non-empty and contain no whitespace")]
    BadId { field: &'static str, value: String },
    #[error("day ({user_id}, {day_id}): seq_index gap, expected {expected} but found {found}")]
    SeqGap {
        user_id: String,
        day_id: String,
        expected: usize,
        found: usize,
    },
    #[error("frame {frame_id:?}: timestamp must strictly increase within its day")]
    TimestampOrder { frame_id: String },
    #[error("frame {frame_id:?}: unknown label {label:?}")]
    UnknownLabel { frame_id: String, label: String },
    #[error("frame {frame_id:?}: value out of range: {msg}")]
    FieldRange { frame_id: String, msg: String },
    #[error("{context}: expected dimension {expected}, got {got}")]
    Dimension {
        context: String,
        expected: usize,
        got: usize,
    },
    #[error("frame {frame_id:?}: {role} row sums to {sum}, outside tolerance")]
    RowNotNormalized {
        frame_id: String,
        role: &'static str,
        sum: f64,
    },
    #[error("frame {frame_id:?}: non-finite feature value")]
    NonFiniteValue { frame_id: String },
    #[error("frame {frame_id:?} missing from {context}")]
    MissingFrame { frame_id: String, context: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("empty input")]
    EmptyInput,
    #[error("class counts are all zero")]
    ZeroCounts,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("category {category:?} has {count} frames, fewer than k = {k}")]
    CategoryTooSmall {
        category: String,
        count: usize,
        k: usize,
    },
    #[error("no day subset within {tolerance} of test fraction {target}")]
    NoFeasibleSubset { target: f64, tolerance: f64 },
    #[error("{days} days exceeds the exhaustive-search cap of {cap}; use beam mode")]
    TooManyDays { days: usize, cap: usize },
    #[error("frame {frame_id:?} is not covered by any window")]
    UncoveredFrame { frame_id: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
