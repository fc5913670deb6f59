//! Evaluation: accuracy, macro precision/recall/F1, per-class recall,
//! normalized confusion matrices, class weights, and report emission.

use std::io::Write;

use crate::domain::{ActivityCategory, CATEGORY_NAMES, NUM_CATEGORIES};
use crate::error::{Error, Result};

/// Row = true class, column = predicted class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: [[u64; NUM_CATEGORIES]; NUM_CATEGORIES],
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        ConfusionMatrix {
            counts: [[0; NUM_CATEGORIES]; NUM_CATEGORIES],
        }
    }
}

impl ConfusionMatrix {
    pub fn record(&mut self, truth: ActivityCategory, predicted: ActivityCategory) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn count(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn row(&self, truth: usize) -> &[u64; NUM_CATEGORIES] {
        &self.counts[truth]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_CATEGORIES).map(|c| self.counts[c][c]).sum()
    }
}

/// Which classes the macro averages run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacroMode {
    /// Unweighted mean over all 21 classes; absent classes contribute 0.
    AllClasses,
    /// Mean over classes present in the ground truth only.
    ActiveOnly,
}

impl MacroMode {
    pub fn name(self) -> &'static str {
        match self {
            MacroMode::AllClasses => "all",
            MacroMode::ActiveOnly => "active_only",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_class_recall: [f64; NUM_CATEGORIES],
    pub confusion: ConfusionMatrix,
    pub macro_mode: MacroMode,
    pub frames: usize,
    /// Effective run configuration, echoed into the report file.
    pub config: Vec<(String, String)>,
}

/// Computes accuracy, per-class recall, and macro precision/recall/F1 from
/// parallel label sequences. Per-class F1 is the harmonic mean of that
/// class's precision and recall, computed before averaging; classes with a
/// zero denominator contribute 0.
pub fn evaluate(
    truth: &[ActivityCategory],
    predicted: &[ActivityCategory],
    macro_mode: MacroMode,
) -> Result<MetricsReport> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut confusion = ConfusionMatrix::default();
    for (&t, &p) in truth.iter().zip(predicted.iter()) {
        confusion.record(t, p);
    }

    let mut precision = [0.0; NUM_CATEGORIES];
    let mut recall = [0.0; NUM_CATEGORIES];
    let mut f1 = [0.0; NUM_CATEGORIES];
    for c in 0..NUM_CATEGORIES {
        let tp = confusion.count(c, c) as f64;
        let row_total: u64 = confusion.row(c).iter().sum();
        let col_total: u64 = (0..NUM_CATEGORIES).map(|r| confusion.count(r, c)).sum();
        if col_total > 0 {
            precision[c] = tp / col_total as f64;
        }
        if row_total > 0 {
            recall[c] = tp / row_total as f64;
        }
        if precision[c] + recall[c] > 0.0 {
            f1[c] = 2.0 * precision[c] * recall[c] / (precision[c] + recall[c]);
        }
    }

    let active: Vec<usize> = match macro_mode {
        MacroMode::AllClasses => (0..NUM_CATEGORIES).collect(),
        MacroMode::ActiveOnly => (0..NUM_CATEGORIES)
            .filter(|&c| confusion.row(c).iter().sum::<u64>() > 0)
            .collect(),
    };
    let mean_over = |values: &[f64; NUM_CATEGORIES]| -> f64 {
        active.iter().map(|&c| values[c]).sum::<f64>() / active.len() as f64
    };

    Ok(MetricsReport {
        accuracy: confusion.trace() as f64 / confusion.total() as f64,
        macro_precision: mean_over(&precision),
        macro_recall: mean_over(&recall),
        macro_f1: mean_over(&f1),
        per_class_recall: recall,
        confusion,
        macro_mode,
        frames: truth.len(),
        config: Vec::new(),
    })
}

/// Inverse-frequency class weights w_c = N / (K * n_c) over the K classes
/// with nonzero counts (absent classes get weight 0), normalized so that
/// sum(w_c * n_c) = N.
pub fn class_weights(label_counts: &[u64; NUM_CATEGORIES]) -> Result<[f64; NUM_CATEGORIES]> {
    let total: u64 = label_counts.iter().sum();
    if total == 0 {
        return Err(Error::ZeroCounts);
    }
    let present = label_counts.iter().filter(|&&c| c > 0).count() as f64;
    let mut weights = [0.0; NUM_CATEGORIES];
    for (w, &c) in weights.iter_mut().zip(label_counts.iter()) {
        if c > 0 {
            *w = total as f64 / (present * c as f64);
        }
    }
    Ok(weights)
}

/// Divides each nonzero row by its sum (rows become recall decompositions);
/// zero rows stay zero and their indices are returned alongside.
pub fn normalize_confusion(
    cm: &ConfusionMatrix,
) -> ([[f64; NUM_CATEGORIES]; NUM_CATEGORIES], Vec<usize>) {
    let mut normalized = [[0.0; NUM_CATEGORIES]; NUM_CATEGORIES];
    let mut zero_rows = Vec::new();
    for r in 0..NUM_CATEGORIES {
        let row_total: u64 = cm.row(r).iter().sum();
        if row_total == 0 {
            zero_rows.push(r);
            continue;
        }
        for c in 0..NUM_CATEGORIES {
            normalized[r][c] = cm.count(r, c) as f64 / row_total as f64;
        }
    }
    (normalized, zero_rows)
}

/// Writes the structured text report: key=value sections followed by the
/// tab-separated confusion matrix.
pub fn write_report(mut w: impl Write, report: &MetricsReport) -> std::io::Result<()> {
    writeln!(w, "[run]")?;
    for (key, value) in &report.config {
        writeln!(w, "{key}={value}")?;
    }
    writeln!(w, "[metrics]")?;
    writeln!(w, "frames={}", report.frames)?;
    writeln!(w, "accuracy={}", report.accuracy)?;
    writeln!(w, "macro_precision={}", report.macro_precision)?;
    writeln!(w, "macro_recall={}", report.macro_recall)?;
    writeln!(w, "macro_f1={}", report.macro_f1)?;
    writeln!(w, "macro_mode={}", report.macro_mode.name())?;
    writeln!(w, "[per_class_recall]")?;
    for (c, name) in CATEGORY_NAMES.iter().enumerate() {
        writeln!(w, "{name}={}", report.per_class_recall[c])?;
    }
    writeln!(w, "[confusion]")?;
    for r in 0..NUM_CATEGORIES {
        let row: Vec<String> = report.confusion.row(r).iter().map(u64::to_string).collect();
        writeln!(w, "{}", row.join("\t"))?;
    }
    Ok(())
}

/// Writes the row-normalized confusion matrix as an ASCII portable graymap
/// (`P2`): 21x21 pixels, maxval 255, one matrix row per line.
pub fn write_confusion_pgm(mut w: impl Write, cm: &ConfusionMatrix) -> std::io::Result<()> {
    let (normalized, _) = normalize_confusion(cm);
    writeln!(w, "P2")?;
    writeln!(w, "{NUM_CATEGORIES} {NUM_CATEGORIES}")?;
    writeln!(w, "255")?;
    for row in &normalized {
        let pixels: Vec<String> = row
            .iter()
            .map(|&v| ((v * 255.0).round() as u8).to_string())
            .collect();
        writeln!(w, "{}", pixels.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(i: usize) -> ActivityCategory {
        ActivityCategory::from_index(i).unwrap()
    }

    #[test]
    fn perfect_predictions_are_all_ones() {
        let labels: Vec<ActivityCategory> = (0..NUM_CATEGORIES).map(cat).collect();
        let report = evaluate(&labels, &labels, MacroMode::AllClasses).unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.macro_precision, 1.0);
        assert_eq!(report.macro_recall, 1.0);
        assert_eq!(report.macro_f1, 1.0);
    }

    #[test]
    fn two_class_golden_values() {
        // Confusion [[2, 0], [1, 1]] embedded in classes 0 and 1.
        let truth = vec![cat(0), cat(0), cat(1), cat(1)];
        let predicted = vec![cat(0), cat(0), cat(0), cat(1)];
        let report = evaluate(&truth, &predicted, MacroMode::ActiveOnly).unwrap();
        assert!((report.macro_precision - 0.8333333333333333).abs() < 1e-12);
        assert!((report.macro_recall - 0.75).abs() < 1e-12);
        assert!((report.macro_f1 - 0.7333333333333334).abs() < 1e-12);
        assert_eq!(report.accuracy, 0.75);
    }

    #[test]
    fn constant_predictor_on_balanced_labels() {
        let truth = vec![cat(0), cat(1), cat(0), cat(1)];
        let predicted = vec![cat(0); 4];
        let report = evaluate(&truth, &predicted, MacroMode::AllClasses).unwrap();
        assert_eq!(report.accuracy, 0.5);
    }

    #[test]
    fn length_mismatch_and_empty_are_errors() {
        assert!(matches!(
            evaluate(&[cat(0)], &[], MacroMode::AllClasses),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            evaluate(&[], &[], MacroMode::AllClasses),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn class_weight_values() {
        let mut counts = [0u64; NUM_CATEGORIES];
        counts[0] = 10;
        counts[1] = 30;
        let w = class_weights(&counts).unwrap();
        assert!((w[0] - 2.0).abs() < 1e-12);
        assert!((w[1] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(w[2], 0.0);

        counts[0] = 25;
        counts[1] = 25;
        let w = class_weights(&counts).unwrap();
        assert_eq!(w[0], 1.0);
        assert_eq!(w[1], 1.0);

        counts[0] = 1;
        counts[1] = 99;
        let w = class_weights(&counts).unwrap();
        assert!((w[0] - 50.0).abs() < 1e-12);
        assert!((w[0] * 1.0 + w[1] * 99.0 - 100.0).abs() < 1e-9);

        assert!(matches!(
            class_weights(&[0; NUM_CATEGORIES]),
            Err(Error::ZeroCounts)
        ));
    }

    #[test]
    fn normalization_rows_and_flags() {
        let mut cm = ConfusionMatrix::default();
        cm.record(cat(0), cat(0));
        cm.record(cat(0), cat(0));
        cm.record(cat(0), cat(1));
        cm.record(cat(0), cat(1));
        let (norm, zero_rows) = normalize_confusion(&cm);
        assert_eq!(norm[0][0], 0.5);
        assert_eq!(norm[0][1], 0.5);
        assert_eq!(zero_rows.len(), NUM_CATEGORIES - 1);
        assert!(zero_rows.contains(&1));
        assert!(!zero_rows.contains(&0));
    }

    #[test]
    fn diagonal_of_normalized_matrix_is_recall() {
        let truth = vec![cat(0), cat(0), cat(0), cat(2), cat(2)];
        let predicted = vec![cat(0), cat(0), cat(2), cat(2), cat(0)];
        let report = evaluate(&truth, &predicted, MacroMode::AllClasses).unwrap();
        let (norm, _) = normalize_confusion(&report.confusion);
        for c in 0..NUM_CATEGORIES {
            if report.confusion.row(c).iter().sum::<u64>() > 0 {
                assert!((norm[c][c] - report.per_class_recall[c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn report_and_pgm_are_well_formed() {
        let truth = vec![cat(0), cat(1)];
        let predicted = vec![cat(0), cat(1)];
        let mut report = evaluate(&truth, &predicted, MacroMode::AllClasses).unwrap();
        report
            .config
            .push(("command".to_string(), "test".to_string()));
        let mut buf = Vec::new();
        write_report(&mut buf, &report).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("[run]\ncommand=test\n"));
        assert!(text.contains("accuracy=1\n"));
        assert!(text.contains("[confusion]\n"));
        assert_eq!(text.lines().count(), 2 + 7 + 22 + 1 + NUM_CATEGORIES);

        let mut pgm = Vec::new();
        write_confusion_pgm(&mut pgm, &report.confusion).unwrap();
        let text = String::from_utf8(pgm).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("P2"));
        assert_eq!(lines.next(), Some("21 21"));
        assert_eq!(lines.next(), Some("255"));
        assert_eq!(lines.clone().count(), NUM_CATEGORIES);
        assert!(lines.next().unwrap().starts_with("255 0"));
    }
}
