//! Shared command plumbing: feature-source resolution, split-source
//! resolution, forest settings, and the per-frame evaluation drivers used
//! by training and evaluate commands.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use lifelog_core::domain::{ActivityCategory, DatasetManifest, NUM_CATEGORIES};
use lifelog_core::features::{
    datetime_matrix, fuse, fusion_signature, load_features_any, FeatureMatrix, FusionSignature,
};
use lifelog_core::forest::{ForestConfig, ForestModel, MaxFeatures};
use lifelog_core::metrics::{evaluate, MacroMode, MetricsReport};
use lifelog_core::recurrent::{Mode, RecurrentModel};
use lifelog_core::splits::{load_day_split, load_fold_plan, DaySplitPlan};
use lifelog_core::temporal::{
    aggregate_per_frame, concat_window_features, label_of, sliding_windows_opt, trailing_windows,
    Window,
};

use crate::cli::{ForestFlags, SplitSource};
use crate::config::Resolver;
use crate::error::{CliError, CliResult};

/// Settings shared by every command.
pub struct Globals {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub aggregate: String,
    pub timestep: usize,
    pub stride: usize,
    pub pad: bool,
    pub macro_mode: MacroMode,
}

pub fn resolve_globals(cli: &crate::cli::Cli, resolver: &mut Resolver) -> CliResult<Globals> {
    let seed = resolver.resolve("run", "seed", cli.seed, 0)?;
    let out_dir: String = resolver.resolve(
        "run",
        "out_dir",
        cli.out_dir.as_ref().map(|p| p.display().to_string()),
        "out".to_string(),
    )?;
    let aggregate = resolver.resolve(
        "run",
        "aggregate",
        cli.aggregate.clone(),
        "mean".to_string(),
    )?;
    if aggregate != "mean" && aggregate != "last" {
        return Err(CliError::usage(format!(
            "aggregate must be `mean` or `last`, got {aggregate:?}"
        )));
    }
    let timestep = resolver.resolve("run", "timestep", cli.timestep, 10)?;
    let stride = resolver.resolve("run", "stride", cli.stride, 1)?;
    if timestep == 0 || stride == 0 {
        return Err(CliError::usage("timestep and stride must be at least 1"));
    }
    let pad = resolver.resolve("run", "pad", cli.no_pad.then_some(false), true)?;
    let macro_mode = if cli.active_only {
        MacroMode::ActiveOnly
    } else {
        MacroMode::AllClasses
    };
    resolver.note("macro_mode", &macro_mode.name());
    Ok(Globals {
        seed,
        out_dir: PathBuf::from(out_dir),
        aggregate,
        timestep,
        stride,
        pad,
        macro_mode,
    })
}

pub fn ensure_out_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(CliError::internal)
}

/// Resolves a comma-separated feature spec (paths and the literal
/// `datetime`) into loaded matrices fused over all manifest frames.
pub fn resolve_features(
    spec: &str,
    manifest: &DatasetManifest,
    resolver: &mut Resolver,
) -> CliResult<(FeatureMatrix, FusionSignature)> {
    let tokens: Vec<&str> = spec.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    if tokens.is_empty() {
        return Err(CliError::usage("feature spec is empty"));
    }
    resolver.note("features", &spec);
    let mut parts: Vec<FeatureMatrix> = Vec::with_capacity(tokens.len());
    for token in &tokens {
        if *token == "datetime" {
            parts.push(datetime_matrix(manifest.frames()));
        } else {
            parts.push(load_features_any(Path::new(token))?);
        }
    }
    let refs: Vec<&FeatureMatrix> = parts.iter().collect();
    let frame_ids: Vec<String> = manifest
        .frames()
        .iter()
        .map(|f| f.frame_id.clone())
        .collect();
    let fused = fuse(&refs, &frame_ids)?;
    let signature = fusion_signature(&refs);
    Ok((fused, signature))
}

/// Frame-id sets of one split, each in manifest order.
pub struct SplitSets {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
    pub day_plan: Option<DaySplitPlan>,
}

pub fn resolve_split(
    source: &SplitSource,
    manifest: &DatasetManifest,
    resolver: &mut Resolver,
) -> CliResult<SplitSets> {
    let mut picks = 0;
    picks += usize::from(source.split_days.is_some());
    picks += usize::from(source.split_folds.is_some());
    picks += usize::from(source.train_frames.is_some() || source.test_frames.is_some());
    if picks != 1 {
        return Err(CliError::usage(
            "exactly one split source required: --split-days, --split-folds --fold N, \
             or --train-frames with --test-frames",
        ));
    }

    if let Some(path) = &source.split_days {
        resolver.note("split_days", &path.display());
        let plan = load_day_split(path)?;
        return Ok(split_sets_from_day_plan(manifest, plan));
    }

    if let Some(path) = &source.split_folds {
        let fold_index = source
            .fold
            .ok_or_else(|| CliError::usage("--split-folds requires --fold <index>"))?;
        resolver.note("split_folds", &path.display());
        resolver.note("fold", &fold_index);
        let plan = load_fold_plan(path)?;
        let fold = plan.folds.get(fold_index).ok_or_else(|| {
            CliError::usage(format!(
                "fold {fold_index} out of range: plan has {} folds",
                plan.folds.len()
            ))
        })?;
        return Ok(SplitSets {
            train: in_manifest_order(manifest, &fold.train),
            validation: in_manifest_order(manifest, &fold.validation),
            test: in_manifest_order(manifest, &fold.test),
            day_plan: None,
        });
    }

    let (train_path, test_path) = match (&source.train_frames, &source.test_frames) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(CliError::usage(
                "--train-frames and --test-frames must be given together",
            ))
        }
    };
    resolver.note("train_frames", &train_path.display());
    resolver.note("test_frames", &test_path.display());
    let read_ids = |path: &PathBuf| -> CliResult<BTreeSet<String>> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Data(lifelog_core::Error::Io {
                path: path.clone(),
                source: e,
            })
        })?;
        Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect())
    };
    let train = read_ids(train_path)?;
    let test = read_ids(test_path)?;
    if let Some(dup) = train.intersection(&test).next() {
        return Err(CliError::usage(format!(
            "frame {dup:?} appears in both --train-frames and --test-frames"
        )));
    }
    Ok(SplitSets {
        train: in_manifest_order(manifest, &train),
        validation: Vec::new(),
        test: in_manifest_order(manifest, &test),
        day_plan: None,
    })
}

pub fn split_sets_from_day_plan(manifest: &DatasetManifest, plan: DaySplitPlan) -> SplitSets {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for f in manifest.frames() {
        let key = (f.user_id.clone(), f.day_id.clone());
        if plan.test_days.contains(&key) {
            test.push(f.frame_id.clone());
        } else if plan.train_days.contains(&key) {
            train.push(f.frame_id.clone());
        }
    }
    SplitSets {
        train,
        validation: Vec::new(),
        test,
        day_plan: Some(plan),
    }
}

fn in_manifest_order(manifest: &DatasetManifest, ids: &BTreeSet<String>) -> Vec<String> {
    manifest
        .frames()
        .iter()
        .filter(|f| ids.contains(&f.frame_id))
        .map(|f| f.frame_id.clone())
        .collect()
}

/// Labels for an ordered frame-id list.
pub fn labeled_frames(
    manifest: &DatasetManifest,
    ids: &[String],
) -> Vec<(String, ActivityCategory)> {
    let labels = manifest.label_map();
    ids.iter()
        .map(|id| (id.clone(), labels[id]))
        .collect()
}

pub fn resolve_forest_config(
    flags: &ForestFlags,
    seed: u64,
    resolver: &mut Resolver,
) -> CliResult<ForestConfig> {
    let n_estimators = resolver.resolve("forest", "trees", flags.trees, 100)?;
    let max_depth = resolver.resolve_opt("forest", "max_depth", flags.max_depth)?;
    let max_features_raw: String = resolver.resolve(
        "forest",
        "max_features",
        flags.max_features.clone(),
        "sqrt".to_string(),
    )?;
    let max_features = match max_features_raw.as_str() {
        "sqrt" => MaxFeatures::Sqrt,
        "all" => MaxFeatures::All,
        other => MaxFeatures::Fixed(other.parse::<usize>().map_err(|_| {
            CliError::usage(format!(
                "max_features must be `sqrt`, `all`, or an integer, got {other:?}"
            ))
        })?),
    };
    let bootstrap = resolver.resolve(
        "forest",
        "bootstrap",
        flags.no_bootstrap.then_some(false),
        true,
    )?;
    Ok(ForestConfig {
        n_estimators,
        max_depth,
        max_features,
        bootstrap,
        rng_seed: seed,
    })
}

/// Per-frame truth/prediction pairs for a per-frame (timestep 1) forest.
pub fn eval_forest_per_frame(
    model: &ForestModel,
    features: &FeatureMatrix,
    labeled: &[(String, ActivityCategory)],
) -> CliResult<(Vec<ActivityCategory>, Vec<ActivityCategory>)> {
    let mut truth = Vec::with_capacity(labeled.len());
    let mut predicted = Vec::with_capacity(labeled.len());
    for (frame_id, label) in labeled {
        let row = features
            .row(frame_id)
            .ok_or_else(|| lifelog_core::Error::MissingFrame {
                frame_id: frame_id.clone(),
                context: "fused features".to_string(),
            })?;
        truth.push(*label);
        predicted.push(model.predict(row)?);
    }
    Ok((truth, predicted))
}

/// Windowed-forest evaluation: each frame is scored by the window ending at
/// it (prefix-padded when allowed). Returns (truth, predicted) over the
/// covered evaluation frames, in manifest order.
pub fn eval_windowed_forest(
    model: &ForestModel,
    features: &FeatureMatrix,
    manifest: &DatasetManifest,
    eval_ids: &BTreeSet<String>,
    pad: bool,
) -> CliResult<(Vec<ActivityCategory>, Vec<ActivityCategory>)> {
    let labels = manifest.label_map();
    let mut truth = Vec::new();
    let mut predicted = Vec::new();
    for segment in manifest.segments() {
        if !segment.frames().iter().any(|f| eval_ids.contains(&f.frame_id)) {
            continue;
        }
        for window in trailing_windows(&segment, model.timestep, pad) {
            let last = window.frame_ids.last().unwrap();
            if !eval_ids.contains(last) {
                continue;
            }
            let row = concat_window_features(&window, features)?;
            truth.push(labels[last]);
            predicted.push(model.predict(&row)?);
        }
    }
    Ok((truth, predicted))
}

/// Recurrent evaluation over a day-split's frames with the configured
/// aggregation: `mean` averages every covering stride-1 window's per-step
/// outputs per frame; `last` takes the final step of the window ending at
/// each frame.
pub fn eval_recurrent(
    model: &RecurrentModel,
    scores: &FeatureMatrix,
    manifest: &DatasetManifest,
    eval_ids: &BTreeSet<String>,
    timestep: usize,
    aggregate: &str,
    pad: bool,
) -> CliResult<(Vec<ActivityCategory>, Vec<ActivityCategory>)> {
    let labels = manifest.label_map();
    let mut truth = Vec::new();
    let mut predicted = Vec::new();
    for segment in manifest.segments() {
        if !segment.frames().iter().any(|f| eval_ids.contains(&f.frame_id)) {
            continue;
        }
        match aggregate {
            "mean" => {
                let windows = sliding_windows_opt(&segment, timestep, 1, pad);
                if windows.is_empty() {
                    continue;
                }
                let mut window_predictions = Vec::with_capacity(windows.len());
                for window in windows {
                    let outputs = forward_window(model, &window, scores)?;
                    window_predictions.push((window, outputs));
                }
                let covered: Vec<String> = segment
                    .frames()
                    .iter()
                    .filter(|f| eval_ids.contains(&f.frame_id))
                    .map(|f| f.frame_id.clone())
                    .collect();
                let aggregated = aggregate_per_frame(&window_predictions, &covered)?;
                for frame_id in &covered {
                    truth.push(labels[frame_id]);
                    predicted.push(label_of(&aggregated[frame_id]));
                }
            }
            "last" => {
                for window in trailing_windows(&segment, timestep, pad) {
                    let last = window.frame_ids.last().unwrap().clone();
                    if !eval_ids.contains(&last) {
                        continue;
                    }
                    let outputs = forward_window(model, &window, scores)?;
                    truth.push(labels[&last]);
                    predicted.push(label_of(outputs.last().unwrap()));
                }
            }
            other => return Err(CliError::usage(format!("unknown aggregate mode {other:?}"))),
        }
    }
    Ok((truth, predicted))
}

fn forward_window(
    model: &RecurrentModel,
    window: &Window,
    scores: &FeatureMatrix,
) -> CliResult<Vec<[f64; NUM_CATEGORIES]>> {
    let mut inputs = Vec::with_capacity(window.frame_ids.len());
    for frame_id in &window.frame_ids {
        let row = scores
            .row(frame_id)
            .ok_or_else(|| lifelog_core::Error::MissingFrame {
                frame_id: frame_id.clone(),
                context: "score features".to_string(),
            })?;
        inputs.push(row.to_vec());
    }
    Ok(model.forward(&inputs, Mode::Eval)?)
}

/// Builds the metrics report with the effective config attached, writes it
/// (and optionally the PGM heatmap), and prints the one-line summary.
pub fn finish_report(
    truth: &[ActivityCategory],
    predicted: &[ActivityCategory],
    macro_mode: MacroMode,
    resolver: &Resolver,
    out_dir: &Path,
    report_name: &str,
    pgm: bool,
) -> CliResult<MetricsReport> {
    let mut report = evaluate(truth, predicted, macro_mode)?;
    report.config = resolver.effective().to_vec();
    let mut buf = Vec::new();
    lifelog_core::metrics::write_report(&mut buf, &report).map_err(CliError::internal)?;
    fs::write(out_dir.join(report_name), buf).map_err(CliError::internal)?;
    if pgm {
        let mut buf = Vec::new();
        lifelog_core::metrics::write_confusion_pgm(&mut buf, &report.confusion)
            .map_err(CliError::internal)?;
        let pgm_name = format!(
            "{}.pgm",
            report_name.strip_suffix(".txt").unwrap_or(report_name)
        );
        fs::write(out_dir.join(pgm_name), buf).map_err(CliError::internal)?;
    }
    crate::say!(
        "{report_name}: frames={} accuracy={:.4} macro_f1={:.4}",
        report.frames, report.accuracy, report.macro_f1
    );
    Ok(report)
}
