//! Plan files: line-oriented text with a key=value header followed by
//! `SPLIT train|test <user_id> <day_id>` or `FOLD <k> train|val|test
//! <frame_id>` records.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::{DaySplitPlan, Fold, FoldPlan};

pub fn write_day_split(mut w: impl Write, plan: &DaySplitPlan) -> std::io::Result<()> {
    writeln!(w, "mode={}", plan.mode)?;
    writeln!(w, "target_test_fraction={}", plan.target_test_fraction)?;
    writeln!(w, "fraction_tolerance={}", plan.fraction_tolerance)?;
    writeln!(w, "objective={}", plan.objective)?;
    for (user, day) in &plan.train_days {
        writeln!(w, "SPLIT train {user} {day}")?;
    }
    for (user, day) in &plan.test_days {
        writeln!(w, "SPLIT test {user} {day}")?;
    }
    Ok(())
}

pub fn save_day_split(path: impl AsRef<Path>, plan: &DaySplitPlan) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_day_split(&mut buf, plan).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_day_split(path: impl AsRef<Path>) -> Result<DaySplitPlan> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_day_split(&text, path)
}

pub(crate) fn parse_day_split(text: &str, path: &Path) -> Result<DaySplitPlan> {
    let mut header: BTreeMap<&str, &str> = BTreeMap::new();
    let mut plan = DaySplitPlan {
        train_days: Default::default(),
        test_days: Default::default(),
        objective: 0.0,
        target_test_fraction: 0.0,
        fraction_tolerance: 0.0,
        mode: String::new(),
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("SPLIT ") {
            let fields: Vec<&str> = rest.split(' ').collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    "expected `SPLIT train|test <user_id> <day_id>`",
                ));
            }
            let key = (fields[1].to_string(), fields[2].to_string());
            match fields[0] {
                "train" => plan.train_days.insert(key),
                "test" => plan.test_days.insert(key),
                other => {
                    return Err(Error::parse(
                        path,
                        lineno + 1,
                        format!("unknown split side {other:?}"),
                    ))
                }
            };
        } else if let Some((key, value)) = line.split_once('=') {
            header.insert(key.trim(), value.trim());
        } else {
            return Err(Error::parse(path, lineno + 1, "unrecognized line"));
        }
    }
    let parse_f64 = |key: &str| -> Result<f64> {
        header
            .get(key)
            .ok_or_else(|| Error::parse(path, 1, format!("missing header {key}=")))?
            .parse::<f64>()
            .map_err(|_| Error::parse(path, 1, format!("invalid {key} value")))
    };
    plan.objective = parse_f64("objective")?;
    plan.target_test_fraction = parse_f64("target_test_fraction")?;
    plan.fraction_tolerance = parse_f64("fraction_tolerance")?;
    plan.mode = header.get("mode").unwrap_or(&"unknown").to_string();
    if plan.train_days.is_empty() || plan.test_days.is_empty() {
        return Err(Error::parse(path, 1, "plan needs train and test days"));
    }
    if let Some(key) = plan.train_days.intersection(&plan.test_days).next() {
        return Err(Error::parse(
            path,
            1,
            format!("day ({}, {}) is on both sides", key.0, key.1),
        ));
    }
    Ok(plan)
}

pub fn write_fold_plan(mut w: impl Write, plan: &FoldPlan) -> std::io::Result<()> {
    writeln!(w, "k={}", plan.k)?;
    writeln!(w, "validation_fraction={}", plan.validation_fraction)?;
    writeln!(w, "rng_seed={}", plan.rng_seed)?;
    for (i, fold) in plan.folds.iter().enumerate() {
        for id in &fold.train {
            writeln!(w, "FOLD {i} train {id}")?;
        }
        for id in &fold.validation {
            writeln!(w, "FOLD {i} val {id}")?;
        }
        for id in &fold.test {
            writeln!(w, "FOLD {i} test {id}")?;
        }
    }
    Ok(())
}

pub fn save_fold_plan(path: impl AsRef<Path>, plan: &FoldPlan) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_fold_plan(&mut buf, plan).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_fold_plan(path: impl AsRef<Path>) -> Result<FoldPlan> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_fold_plan(&text, path)
}

pub(crate) fn parse_fold_plan(text: &str, path: &Path) -> Result<FoldPlan> {
    let mut header: BTreeMap<&str, &str> = BTreeMap::new();
    let mut records: Vec<(usize, &str, &str)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("FOLD ") {
            let fields: Vec<&str> = rest.split(' ').collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    "expected `FOLD <k> train|val|test <frame_id>`",
                ));
            }
            let fold_index: usize = fields[0].parse().map_err(|_| {
                Error::parse(path, lineno + 1, format!("invalid fold index {:?}", fields[0]))
            })?;
            records.push((fold_index, fields[1], fields[2]));
        } else if let Some((key, value)) = line.split_once('=') {
            header.insert(key.trim(), value.trim());
        } else {
            return Err(Error::parse(path, lineno + 1, "unrecognized line"));
        }
    }
    let k: usize = header
        .get("k")
        .ok_or_else(|| Error::parse(path, 1, "missing header k="))?
        .parse()
        .map_err(|_| Error::parse(path, 1, "invalid k value"))?;
    let validation_fraction: f64 = header
        .get("validation_fraction")
        .unwrap_or(&"0")
        .parse()
        .map_err(|_| Error::parse(path, 1, "invalid validation_fraction value"))?;
    let rng_seed: u64 = header
        .get("rng_seed")
        .unwrap_or(&"0")
        .parse()
        .map_err(|_| Error::parse(path, 1, "invalid rng_seed value"))?;
    let mut folds = vec![
        Fold {
            train: Default::default(),
            validation: Default::default(),
            test: Default::default(),
        };
        k
    ];
    for (fold_index, side, frame_id) in records {
        let fold = folds.get_mut(fold_index).ok_or_else(|| {
            Error::parse(path, 1, format!("fold index {fold_index} out of range for k={k}"))
        })?;
        let set = match side {
            "train" => &mut fold.train,
            "val" => &mut fold.validation,
            "test" => &mut fold.test,
            other => return Err(Error::parse(path, 1, format!("unknown fold side {other:?}"))),
        };
        set.insert(frame_id.to_string());
    }
    Ok(FoldPlan {
        k,
        validation_fraction,
        rng_seed,
        folds,
    })
}
