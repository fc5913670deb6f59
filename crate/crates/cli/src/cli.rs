//! Command-line surface.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "lifelog",
    about = "Temporal activity classification over wearable photo-streams",
    disable_help_subcommand = true
)]
pub struct Cli {
    /// Master RNG seed (flag > config > 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Config file with `[section] key = value` settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory for models, plans, and reports.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Per-frame aggregation of overlapping window predictions.
    #[arg(long, global = true, value_parser = ["mean", "last"])]
    pub aggregate: Option<String>,

    /// Sliding-window length in frames.
    #[arg(long, global = true)]
    pub timestep: Option<usize>,

    /// Sliding-window stride for training batches.
    #[arg(long, global = true)]
    pub stride: Option<usize>,

    /// Disable first-frame padding for days shorter than the timestep.
    #[arg(long, global = true)]
    pub no_pad: bool,

    /// Average macro metrics only over classes present in the ground truth.
    #[arg(long, global = true)]
    pub active_only: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic labeled photo-stream with feature files.
    Generate(GenerateArgs),
    /// Build a dataset split plan (day-level or stratified folds).
    Split(SplitArgs),
    /// Train the per-frame fused-feature forest and cache its scores.
    TrainEnsemble(TrainEnsembleArgs),
    /// Train a temporal classifier over sliding windows of phase-1 scores.
    TrainTemporal(TrainTemporalArgs),
    /// Mean validation accuracy per forest size over a fold plan.
    SweepTrees(SweepTreesArgs),
    /// Evaluate a saved model on a split.
    Evaluate(EvaluateArgs),
    /// Print a model file as JSON.
    DumpModel(DumpModelArgs),
}

#[derive(Debug, clap::Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub users: Option<usize>,
    #[arg(long)]
    pub days_per_user: Option<usize>,
    #[arg(long)]
    pub frames_per_day: Option<usize>,
    /// Self-transition probability of the label chain, in (0, 1].
    #[arg(long)]
    pub persistence: Option<f64>,
    /// Embedding dimension (>= 2).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Gaussian noise scale for embeddings and score logits.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Softmax temperature of the synthetic score rows.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Comma-separated stationary weights for the 21 categories.
    #[arg(long)]
    pub label_bias: Option<String>,
    /// Write feature files in the binary form instead of text.
    #[arg(long)]
    pub binary_features: bool,
}

#[derive(Debug, clap::Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// `day` (Bhattacharyya-optimized whole days) or `folds` (stratified).
    #[arg(long, value_parser = ["day", "folds"])]
    pub mode: String,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(long)]
    pub fraction_tolerance: Option<f64>,
    /// Beam width; switches the day-split search to the beam heuristic.
    #[arg(long)]
    pub beam: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub validation_fraction: Option<f64>,
}

#[derive(Debug, clap::Args)]
pub struct SplitSource {
    /// Day-level split plan file.
    #[arg(long)]
    pub split_days: Option<PathBuf>,
    /// Stratified fold plan file (requires --fold).
    #[arg(long)]
    pub split_folds: Option<PathBuf>,
    /// Fold index into --split-folds.
    #[arg(long)]
    pub fold: Option<usize>,
    /// Plain file of training frame ids, one per line (with --test-frames).
    #[arg(long)]
    pub train_frames: Option<PathBuf>,
    /// Plain file of test frame ids, one per line (with --train-frames).
    #[arg(long)]
    pub test_frames: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ForestFlags {
    /// Number of trees.
    #[arg(long)]
    pub trees: Option<usize>,
    /// Depth cap; unlimited growth (pure leaves) when absent.
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// `sqrt`, `all`, or an integer feature count per node.
    #[arg(long)]
    pub max_features: Option<String>,
    /// Train each tree on the full sample instead of a bootstrap resample.
    #[arg(long)]
    pub no_bootstrap: bool,
}

#[derive(Debug, clap::Args)]
pub struct TrainEnsembleArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated feature sources, fused in order: file paths and/or
    /// the literal `datetime`.
    #[arg(long)]
    pub features: String,
    #[command(flatten)]
    pub split: SplitSource,
    #[command(flatten)]
    pub forest: ForestFlags,
    /// Expected fused dimension; errors if the files disagree.
    #[arg(long)]
    pub expect_dim: Option<usize>,
    /// Write the cached score file in binary form.
    #[arg(long)]
    pub binary_scores: bool,
    /// Also emit the normalized confusion matrix as a PGM heatmap.
    #[arg(long)]
    pub pgm: bool,
}

#[derive(Debug, clap::Args)]
pub struct TrainTemporalArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// `m2o` (many-to-one windowed forest) or `recurrent` (many-to-many).
    #[arg(long, value_parser = ["m2o", "recurrent"])]
    pub mode: String,
    /// Day-level split plan file.
    #[arg(long)]
    pub split_days: PathBuf,
    /// Feature sources for m2o mode (fused per frame, then windowed).
    #[arg(long)]
    pub features: Option<String>,
    /// Phase-1 score file for recurrent mode.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Phase-1 ensemble model; with --features, recomputes scores.
    #[arg(long)]
    pub ensemble_model: Option<PathBuf>,
    #[command(flatten)]
    pub forest: ForestFlags,
    #[arg(long)]
    pub hidden_units: Option<usize>,
    #[arg(long)]
    pub dropout: Option<f64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_windows: Option<usize>,
    #[arg(long)]
    pub pgm: bool,
}

#[derive(Debug, clap::Args)]
pub struct SweepTreesArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub features: String,
    /// Stratified fold plan file with validation sets.
    #[arg(long)]
    pub folds: PathBuf,
    /// Comma-separated tree counts to evaluate.
    #[arg(long)]
    pub counts: String,
    #[command(flatten)]
    pub forest: ForestFlags,
}

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Model file (`TFRF` forest or `TFRC` recurrent, detected by magic).
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub split: SplitSource,
    /// Which side of the split to evaluate.
    #[arg(long, value_parser = ["train", "validation", "test"])]
    pub on: Option<String>,
    /// Feature sources for forest models.
    #[arg(long)]
    pub features: Option<String>,
    /// Score file for recurrent models.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub pgm: bool,
}

#[derive(Debug, clap::Args)]
pub struct DumpModelArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
