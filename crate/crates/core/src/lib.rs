// Indexed loops over parallel arrays are the house style in the numeric
// kernels (gates, confusion matrices, count vectors).
#![allow(clippy::needless_range_loop)]

//! Temporal activity classification for wearable photo-streams.
//!
//! The pipeline has two phases. Phase one trains a random decision forest
//! on fused per-frame feature vectors and caches its per-frame class
//! scores. Phase two trains temporal classifiers on overlapping
//! sliding-window batches of those scores: a many-to-many recurrent network
//! and a many-to-one concatenated-window forest. Supporting machinery
//! covers dataset manifests, feature files, stratified folds, day-level
//! split optimization, evaluation metrics, and a synthetic photo-stream
//! generator for end-to-end verification.

pub mod domain;
pub mod error;
pub mod features;
pub mod forest;
pub mod metrics;
pub mod recurrent;
pub mod rng;
pub mod splits;
pub mod synth;
pub mod temporal;

pub use error::{Error, Result};
