//! Subcommand implementations. Two-phase training is enforced by artifact
//! boundaries: `train-ensemble` writes the phase-1 model plus its cached
//! per-frame score file, and `train-temporal` consumes those scores.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use lifelog_core::domain::{load_manifest, save_manifest, NUM_CATEGORIES};
use lifelog_core::features::{load_features, save_features, FeatureMatrix, FeatureRole};
use lifelog_core::forest::{forest_to_json, load_forest, save_forest, train_forest, TrainingData};
use lifelog_core::recurrent::{
    load_recurrent, recurrent_to_json, save_recurrent, train as train_recurrent, write_train_log,
    TrainConfig, TrainWindow,
};
use lifelog_core::rng::derive_seed;
use lifelog_core::splits::{
    optimize_day_split, save_day_split, save_fold_plan, stratified_folds, verify_fold_plan,
    SearchMode,
};
use lifelog_core::synth::{generate, StreamSpec};
use lifelog_core::temporal::{concat_window_features, many_to_one_label, sliding_windows_opt};

use crate::cli::{
    Cli, DumpModelArgs, EvaluateArgs, GenerateArgs, SplitArgs, SweepTreesArgs, TrainEnsembleArgs,
    TrainTemporalArgs,
};
use crate::config::{ConfigFile, Resolver};
use crate::error::{CliError, CliResult};
use crate::pipeline::{
    ensure_out_dir, eval_forest_per_frame, eval_recurrent, eval_windowed_forest, finish_report,
    labeled_frames, resolve_features, resolve_forest_config, resolve_globals, resolve_split,
    Globals,
};

fn setup(cli: &Cli, command: &str) -> CliResult<(Resolver, Globals)> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let mut resolver = Resolver::new(file, command);
    let globals = resolve_globals(cli, &mut resolver)?;
    ensure_out_dir(&globals.out_dir)?;
    Ok((resolver, globals))
}

pub fn cmd_generate(cli: &Cli, args: &GenerateArgs) -> CliResult<()> {
    let (mut resolver, globals) = setup(cli, "generate")?;
    let users = resolver.resolve("generate", "users", args.users, 3)?;
    let days = resolver.resolve("generate", "days_per_user", args.days_per_user, 5)?;
    let frames = resolver.resolve("generate", "frames_per_day", args.frames_per_day, 300)?;
    let persistence = resolver.resolve("generate", "persistence", args.persistence, 0.95)?;
    let dim = resolver.resolve("generate", "dim", args.dim, 21)?;
    let sigma = resolver.resolve("generate", "sigma", args.sigma, 0.5)?;
    let temperature = resolver.resolve("generate", "temperature", args.temperature, 1.0)?;
    let bias_raw = resolver.resolve_opt("generate", "label_bias", args.label_bias.clone())?;
    let binary = args.binary_features;
    resolver.note("binary_features", &binary);

    let mut spec = StreamSpec::new(
        users,
        days,
        frames,
        persistence,
        dim,
        sigma,
        temperature,
        globals.seed,
    );
    if let Some(raw) = bias_raw {
        let weights: Vec<f64> = raw
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::usage(format!("label_bias: invalid weight {s:?}")))
            })
            .collect::<CliResult<_>>()?;
        if weights.len() != NUM_CATEGORIES {
            return Err(CliError::usage(format!(
                "label_bias needs {NUM_CATEGORIES} weights, got {}",
                weights.len()
            )));
        }
        let mut bias = [0.0; NUM_CATEGORIES];
        bias.copy_from_slice(&weights);
        spec.label_bias = Some(bias);
    }

    let (manifest, embedding, scores) = generate(&spec)?;
    let ext = if binary { "tffm" } else { "tsv" };
    save_manifest(globals.out_dir.join("manifest.tsv"), &manifest)?;
    save_features(globals.out_dir.join(format!("embedding.{ext}")), &embedding, binary)?;
    save_features(globals.out_dir.join(format!("scores.{ext}")), &scores, binary)?;
    resolver.write_echo(&globals.out_dir)?;
    crate::say!(
        "generated {} frames ({} users x {} days x {} frames) into {}",
        manifest.len(),
        users,
        days,
        frames,
        globals.out_dir.display()
    );
    Ok(())
}

pub fn cmd_split(cli: &Cli, args: &SplitArgs) -> CliResult<()> {
    let (mut resolver, globals) = setup(cli, "split")?;
    resolver.note("manifest", &args.manifest.display());
    resolver.note("mode", &args.mode);
    let manifest = load_manifest(&args.manifest)?;

    match args.mode.as_str() {
        "day" => {
            let target = resolver.resolve("split", "test_fraction", args.test_fraction, 0.3)?;
            let tolerance =
                resolver.resolve("split", "fraction_tolerance", args.fraction_tolerance, 0.05)?;
            let beam = resolver.resolve_opt("split", "beam", args.beam)?;
            let mode = match beam {
                Some(width) => SearchMode::Beam(width),
                None => SearchMode::Exhaustive,
            };
            let plan = optimize_day_split(&manifest, target, tolerance, mode)?;
            let path = globals.out_dir.join("day-split.txt");
            save_day_split(&path, &plan)?;
            crate::say!(
                "day split: objective={} train_days={} test_days={} -> {}",
                plan.objective,
                plan.train_days.len(),
                plan.test_days.len(),
                path.display()
            );
            // Per-user frame counts on each side.
            let mut users: BTreeSet<&str> =
                manifest.frames().iter().map(|f| f.user_id.as_str()).collect();
            for user in std::mem::take(&mut users) {
                let count = |days: &BTreeSet<(String, String)>| {
                    manifest
                        .frames()
                        .iter()
                        .filter(|f| {
                            f.user_id == user
                                && days.contains(&(f.user_id.clone(), f.day_id.clone()))
                        })
                        .count()
                };
                crate::say!(
                    "  user {user}: train {} frames, test {} frames",
                    count(&plan.train_days),
                    count(&plan.test_days)
                );
            }
        }
        "folds" => {
            let k = resolver.resolve("split", "k", args.k, 10)?;
            let vf = resolver.resolve(
                "split",
                "validation_fraction",
                args.validation_fraction,
                0.1,
            )?;
            let plan = stratified_folds(&manifest, k, vf, globals.seed)?;
            verify_fold_plan(&plan, &manifest)?;
            let path = globals.out_dir.join("folds.txt");
            save_fold_plan(&path, &plan)?;
            crate::say!(
                "fold plan: k={} validation_fraction={} -> {}",
                k,
                vf,
                path.display()
            );
            for (i, fold) in plan.folds.iter().enumerate() {
                crate::say!(
                    "  fold {i}: train {} val {} test {}",
                    fold.train.len(),
                    fold.validation.len(),
                    fold.test.len()
                );
            }
        }
        other => return Err(CliError::usage(format!("unknown split mode {other:?}"))),
    }
    resolver.write_echo(&globals.out_dir)?;
    Ok(())
}

pub fn cmd_train_ensemble(cli: &Cli, args: &TrainEnsembleArgs) -> CliResult<()> {
    let (mut resolver, globals) = setup(cli, "train-ensemble")?;
    resolver.note("manifest", &args.manifest.display());
    let manifest = load_manifest(&args.manifest)?;
    let (fused, signature) = resolve_features(&args.features, &manifest, &mut resolver)?;

    if let Some(expected) = args.expect_dim {
        resolver.note("expect_dim", &expected);
        if fused.dim() != expected {
            return Err(CliError::Data(lifelog_core::Error::Dimension {
                context: "fused features vs expect_dim".to_string(),
                expected,
                got: fused.dim(),
            }));
        }
    }

    let sets = resolve_split(&args.split, &manifest, &mut resolver)?;
    let config = resolve_forest_config(&args.forest, globals.seed, &mut resolver)?;

    let train_labeled = labeled_frames(&manifest, &sets.train);
    if train_labeled.is_empty() {
        return Err(CliError::usage("split leaves no training frames"));
    }
    let present: BTreeSet<usize> = train_labeled.iter().map(|(_, l)| l.index()).collect();
    if present.len() == 1 {
        eprintln!(
            "warning: training set contains a single category ({}); the model will predict it everywhere",
            train_labeled[0].1
        );
    }

    let data = TrainingData::from_features(&fused, &train_labeled)?;
    let model = train_forest(&data, &config, signature, 1)?;
    resolver.note("realized_max_depth", &model.realized_max_depth);

    let model_path = globals.out_dir.join("ensemble.tfrf");
    save_forest(&model_path, &model)?;

    // Phase-1 cache: class scores for every frame, consumed by phase 2.
    let mut scores = FeatureMatrix::new(FeatureRole::Score, NUM_CATEGORIES);
    for f in manifest.frames() {
        let row = fused.row(&f.frame_id).expect("fused covers all frames");
        scores.insert(f.frame_id.clone(), model.predict_proba(row)?.to_vec())?;
    }
    let ext = if args.binary_scores { "tffm" } else { "tsv" };
    let scores_path = globals.out_dir.join(format!("ensemble-scores.{ext}"));
    save_features(&scores_path, &scores, args.binary_scores)?;

    let eval_labeled = labeled_frames(&manifest, &sets.test);
    if eval_labeled.is_empty() {
        return Err(CliError::usage("split leaves no test frames"));
    }
    let (truth, predicted) = eval_forest_per_frame(&model, &fused, &eval_labeled)?;
    finish_report(
        &truth,
        &predicted,
        globals.macro_mode,
        &resolver,
        &globals.out_dir,
        "report-ensemble.txt",
        args.pgm,
    )?;
    resolver.write_echo(&globals.out_dir)?;
    crate::say!(
        "ensemble model -> {} ; scores -> {}",
        model_path.display(),
        scores_path.display()
    );
    Ok(())
}

pub fn cmd_train_temporal(cli: &Cli, args: &TrainTemporalArgs) -> CliResult<()> {
    let (mut resolver, globals) = setup(cli, "train-temporal")?;
    resolver.note("manifest", &args.manifest.display());
    resolver.note("mode", &args.mode);
    resolver.note("split_days", &args.split_days.display());
    let manifest = load_manifest(&args.manifest)?;
    let plan = lifelog_core::splits::load_day_split(&args.split_days)?;
    let train_days = plan.train_days.clone();
    let sets = crate::pipeline::split_sets_from_day_plan(&manifest, plan);
    let test_ids: BTreeSet<String> = sets.test.iter().cloned().collect();
    let labels = manifest.label_map();

    match args.mode.as_str() {
        "m2o" => {
            let spec = args.features.as_deref().ok_or_else(|| {
                CliError::usage("--mode m2o requires --features")
            })?;
            let (fused, signature) = resolve_features(spec, &manifest, &mut resolver)?;
            let config = resolve_forest_config(&args.forest, globals.seed, &mut resolver)?;

            let mut rows: Vec<f64> = Vec::new();
            let mut window_labels = Vec::new();
            for segment in manifest.segments() {
                let key = (segment.user_id().to_string(), segment.day_id().to_string());
                if !train_days.contains(&key) {
                    continue;
                }
                for window in
                    sliding_windows_opt(&segment, globals.timestep, globals.stride, globals.pad)
                {
                    rows.extend(concat_window_features(&window, &fused)?);
                    window_labels.push(many_to_one_label(&window, &labels)?.index());
                }
            }
            if window_labels.is_empty() {
                return Err(CliError::Data(lifelog_core::Error::Config(format!(
                    "timestep {} yields no training windows (padding disabled and every training day is shorter)",
                    globals.timestep
                ))));
            }
            let data = TrainingData::new(fused.dim() * globals.timestep, rows, window_labels)?;
            let model = train_forest(&data, &config, signature, globals.timestep)?;
            resolver.note("realized_max_depth", &model.realized_max_depth);
            let model_path = globals.out_dir.join("temporal-forest.tfrf");
            save_forest(&model_path, &model)?;

            let (truth, predicted) =
                eval_windowed_forest(&model, &fused, &manifest, &test_ids, globals.pad)?;
            if truth.is_empty() {
                return Err(CliError::usage("split leaves no evaluable test frames"));
            }
            finish_report(
                &truth,
                &predicted,
                globals.macro_mode,
                &resolver,
                &globals.out_dir,
                "report-temporal.txt",
                args.pgm,
            )?;
            crate::say!("windowed forest -> {}", model_path.display());
        }
        "recurrent" => {
            let scores = load_scores(args, &manifest, &mut resolver)?;
            let hidden = resolver.resolve("recurrent", "hidden_units", args.hidden_units, 32)?;
            let dropout = resolver.resolve("recurrent", "dropout", args.dropout, 0.5)?;
            let config = TrainConfig {
                learning_rate: resolver.resolve(
                    "recurrent",
                    "learning_rate",
                    args.learning_rate,
                    1e-3,
                )?,
                momentum: resolver.resolve("recurrent", "momentum", args.momentum, 0.9)?,
                weight_decay: resolver.resolve(
                    "recurrent",
                    "weight_decay",
                    args.weight_decay,
                    5e-6,
                )?,
                epochs: resolver.resolve("recurrent", "epochs", args.epochs, 50)?,
                batch_windows: resolver.resolve(
                    "recurrent",
                    "batch_windows",
                    args.batch_windows,
                    16,
                )?,
                rng_seed: globals.seed,
            };

            let mut windows = Vec::new();
            for segment in manifest.segments() {
                let key = (segment.user_id().to_string(), segment.day_id().to_string());
                if !train_days.contains(&key) {
                    continue;
                }
                for window in
                    sliding_windows_opt(&segment, globals.timestep, globals.stride, globals.pad)
                {
                    let mut inputs = Vec::with_capacity(window.frame_ids.len());
                    let mut targets = Vec::with_capacity(window.frame_ids.len());
                    for frame_id in &window.frame_ids {
                        let row = scores.row(frame_id).ok_or_else(|| {
                            lifelog_core::Error::MissingFrame {
                                frame_id: frame_id.clone(),
                                context: "score features".to_string(),
                            }
                        })?;
                        inputs.push(row.to_vec());
                        targets.push(labels[frame_id]);
                    }
                    windows.push(TrainWindow { inputs, targets });
                }
            }
            if windows.is_empty() {
                return Err(CliError::Data(lifelog_core::Error::Config(format!(
                    "timestep {} yields no training windows (padding disabled and every training day is shorter)",
                    globals.timestep
                ))));
            }
            let (model, log) = train_recurrent(&windows, hidden, dropout, &config)?;
            let model_path = globals.out_dir.join("temporal-recurrent.tfrc");
            save_recurrent(&model_path, &model)?;
            let mut buf = Vec::new();
            write_train_log(&mut buf, &log).map_err(CliError::internal)?;
            fs::write(globals.out_dir.join("train-log.tsv"), buf).map_err(CliError::internal)?;

            let (truth, predicted) = eval_recurrent(
                &model,
                &scores,
                &manifest,
                &test_ids,
                globals.timestep,
                &globals.aggregate,
                globals.pad,
            )?;
            if truth.is_empty() {
                return Err(CliError::usage("split leaves no evaluable test frames"));
            }
            finish_report(
                &truth,
                &predicted,
                globals.macro_mode,
                &resolver,
                &globals.out_dir,
                "report-temporal.txt",
                args.pgm,
            )?;
            crate::say!("recurrent model -> {}", model_path.display());
        }
        other => return Err(CliError::usage(format!("unknown temporal mode {other:?}"))),
    }
    resolver.write_echo(&globals.out_dir)?;
    Ok(())
}

/// Phase-2 inputs: either a cached score file or a phase-1 model plus the
/// features to run it on.
fn load_scores(
    args: &TrainTemporalArgs,
    manifest: &lifelog_core::domain::DatasetManifest,
    resolver: &mut Resolver,
) -> CliResult<FeatureMatrix> {
    match (&args.scores, &args.ensemble_model) {
        (Some(path), None) => {
            resolver.note("scores", &path.display());
            Ok(load_features(path, FeatureRole::Score)?)
        }
        (None, Some(model_path)) => {
            let spec = args.features.as_deref().ok_or_else(|| {
                CliError::usage("--ensemble-model requires --features to recompute scores")
            })?;
            resolver.note("ensemble_model", &model_path.display());
            let model = load_forest(model_path)?;
            let (fused, _) = resolve_features(spec, manifest, resolver)?;
            if fused.dim() != model.feature_dim {
                return Err(CliError::Data(lifelog_core::Error::Dimension {
                    context: "fused features vs ensemble model".to_string(),
                    expected: model.feature_dim,
                    got: fused.dim(),
                }));
            }
            let mut scores = FeatureMatrix::new(FeatureRole::Score, NUM_CATEGORIES);
            for f in manifest.frames() {
                let row = fused.row(&f.frame_id).expect("fused covers all frames");
                scores.insert(f.frame_id.clone(), model.predict_proba(row)?.to_vec())?;
            }
            Ok(scores)
        }
        (None, None) => Err(CliError::usage(
            "--mode recurrent requires --scores or --ensemble-model",
        )),
        (Some(_), Some(_)) => Err(CliError::usage(
            "--scores and --ensemble-model are mutually exclusive",
        )),
    }
}

pub fn cmd_sweep_trees(cli: &Cli, args: &SweepTreesArgs) -> CliResult<()> {
    let (mut resolver, globals) = setup(cli, "sweep-trees")?;
    resolver.note("manifest", &args.manifest.display());
    resolver.note("folds", &args.folds.display());
    let manifest = load_manifest(&args.manifest)?;
    let (fused, signature) = resolve_features(&args.features, &manifest, &mut resolver)?;
    let plan = lifelog_core::splits::load_fold_plan(&args.folds)?;

    let mut counts: Vec<usize> = Vec::new();
    for token in args.counts.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let value: usize = token
            .parse()
            .map_err(|_| CliError::usage(format!("counts: invalid tree count {token:?}")))?;
        if counts.contains(&value) {
            eprintln!("warning: duplicate tree count {value} ignored");
        } else {
            counts.push(value);
        }
    }
    if counts.is_empty() {
        return Err(CliError::usage("counts must name at least one tree count"));
    }
    resolver.note("counts", &args.counts);

    let base = resolve_forest_config(&args.forest, globals.seed, &mut resolver)?;
    let mut table = Vec::with_capacity(counts.len());
    for &n_estimators in &counts {
        let mut accuracy_sum = 0.0;
        for (fold_index, fold) in plan.folds.iter().enumerate() {
            let train_ids: Vec<String> = manifest
                .frames()
                .iter()
                .filter(|f| fold.train.contains(&f.frame_id))
                .map(|f| f.frame_id.clone())
                .collect();
            let val_ids: Vec<String> = manifest
                .frames()
                .iter()
                .filter(|f| fold.validation.contains(&f.frame_id))
                .map(|f| f.frame_id.clone())
                .collect();
            if val_ids.is_empty() {
                return Err(CliError::usage(format!(
                    "fold {fold_index} has no validation frames; regenerate the plan with a validation fraction"
                )));
            }
            let config = lifelog_core::forest::ForestConfig {
                n_estimators,
                rng_seed: derive_seed(derive_seed(globals.seed, n_estimators as u64), fold_index as u64),
                ..base.clone()
            };
            let data = TrainingData::from_features(&fused, &labeled_frames(&manifest, &train_ids))?;
            let model = train_forest(&data, &config, signature.clone(), 1)?;
            let labeled = labeled_frames(&manifest, &val_ids);
            let (truth, predicted) = eval_forest_per_frame(&model, &fused, &labeled)?;
            let correct = truth
                .iter()
                .zip(predicted.iter())
                .filter(|(t, p)| t == p)
                .count();
            accuracy_sum += correct as f64 / truth.len() as f64;
        }
        let mean = accuracy_sum / plan.folds.len() as f64;
        crate::say!("n_estimators={n_estimators} mean_validation_accuracy={mean:.4}");
        table.push((n_estimators, mean));
    }

    let mut text = String::from("n_estimators\tmean_validation_accuracy\n");
    for (n, acc) in &table {
        text.push_str(&format!("{n}\t{acc}\n"));
    }
    fs::write(globals.out_dir.join("sweep-trees.tsv"), text).map_err(CliError::internal)?;
    resolver.write_echo(&globals.out_dir)?;
    Ok(())
}

pub fn cmd_evaluate(cli: &Cli, args: &EvaluateArgs) -> CliResult<()> {
    let (mut resolver, globals) = setup(cli, "evaluate")?;
    resolver.note("manifest", &args.manifest.display());
    resolver.note("model", &args.model.display());
    let manifest = load_manifest(&args.manifest)?;
    let sets = resolve_split(&args.split, &manifest, &mut resolver)?;
    let on = args.on.clone().unwrap_or_else(|| "test".to_string());
    resolver.note("on", &on);
    let eval_list = match on.as_str() {
        "train" => &sets.train,
        "validation" => &sets.validation,
        "test" => &sets.test,
        other => return Err(CliError::usage(format!("unknown evaluation side {other:?}"))),
    };
    if eval_list.is_empty() {
        return Err(CliError::usage(format!("split has no {on} frames")));
    }
    let eval_ids: BTreeSet<String> = eval_list.iter().cloned().collect();

    let magic = read_magic(&args.model)?;
    match &magic {
        b"TFRF" => {
            let model = load_forest(&args.model)?;
            let spec = args
                .features
                .as_deref()
                .ok_or_else(|| CliError::usage("forest models need --features"))?;
            let (fused, _) = resolve_features(spec, &manifest, &mut resolver)?;
            let expected_per_frame = model.feature_dim / model.timestep;
            if fused.dim() != expected_per_frame {
                return Err(CliError::Data(lifelog_core::Error::Dimension {
                    context: "fused features vs model".to_string(),
                    expected: expected_per_frame,
                    got: fused.dim(),
                }));
            }
            let (truth, predicted) = if model.timestep == 1 {
                let labeled = labeled_frames(&manifest, eval_list);
                eval_forest_per_frame(&model, &fused, &labeled)?
            } else {
                eval_windowed_forest(&model, &fused, &manifest, &eval_ids, globals.pad)?
            };
            finish_report(
                &truth,
                &predicted,
                globals.macro_mode,
                &resolver,
                &globals.out_dir,
                "report-evaluate.txt",
                args.pgm,
            )?;
        }
        b"TFRC" => {
            let model = load_recurrent(&args.model)?;
            let scores_path = args
                .scores
                .as_ref()
                .ok_or_else(|| CliError::usage("recurrent models need --scores"))?;
            resolver.note("scores", &scores_path.display());
            let scores = load_features(scores_path, FeatureRole::Score)?;
            let (truth, predicted) = eval_recurrent(
                &model,
                &scores,
                &manifest,
                &eval_ids,
                globals.timestep,
                &globals.aggregate,
                globals.pad,
            )?;
            if truth.is_empty() {
                return Err(CliError::usage("no evaluable frames on this split side"));
            }
            finish_report(
                &truth,
                &predicted,
                globals.macro_mode,
                &resolver,
                &globals.out_dir,
                "report-evaluate.txt",
                args.pgm,
            )?;
        }
        other => {
            return Err(CliError::Data(lifelog_core::Error::Parse {
                path: args.model.clone(),
                line: 0,
                msg: format!("unknown model magic {:?}", String::from_utf8_lossy(other)),
            }))
        }
    }
    resolver.write_echo(&globals.out_dir)?;
    Ok(())
}

pub fn cmd_dump_model(_cli: &Cli, args: &DumpModelArgs) -> CliResult<()> {
    let magic = read_magic(&args.model)?;
    let json = match &magic {
        b"TFRF" => forest_to_json(&load_forest(&args.model)?),
        b"TFRC" => recurrent_to_json(&load_recurrent(&args.model)?),
        other => {
            return Err(CliError::Data(lifelog_core::Error::Parse {
                path: args.model.clone(),
                line: 0,
                msg: format!("unknown model magic {:?}", String::from_utf8_lossy(other)),
            }))
        }
    };
    match &args.out {
        Some(path) => fs::write(path, json).map_err(CliError::internal)?,
        None => {
            use std::io::Write;
            // Tolerate a closed pipe (e.g. `lifelog dump-model ... | head`).
            if let Err(e) = std::io::stdout().write_all(json.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(CliError::internal(e));
                }
            }
        }
    }
    Ok(())
}

fn read_magic(path: &Path) -> CliResult<[u8; 4]> {
    let bytes = fs::read(path).map_err(|e| {
        CliError::Data(lifelog_core::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })?;
    if bytes.len() < 4 {
        return Err(CliError::Data(lifelog_core::Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: "file too short to hold a model".to_string(),
        }));
    }
    Ok([bytes[0], bytes[1], bytes[2], bytes[3]])
}
