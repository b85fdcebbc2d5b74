//! Accuracy, per-class F1, and macro-F1 over a confusion matrix.

use crate::error::{Error, Result};

/// Classification metrics. `confusion[true][pred]` holds raw counts. A class
/// absent from both the labels and the predictions contributes F1 = 0 and is
/// listed in `degenerate_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub per_class_f1: Vec<f64>,
    pub confusion: Vec<Vec<usize>>,
    pub n_samples: usize,
    pub degenerate_classes: Vec<usize>,
}

/// One-vs-rest precision/recall per class: `F1 = 2PR / (P + R)`, with zero
/// whenever the denominator degenerates. Macro-F1 is the unweighted mean.
pub fn compute_metrics(predictions: &[usize], labels: &[usize], k: usize) -> Result<MetricsReport> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput("metrics need at least one prediction"));
    }
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: predictions.len(),
        });
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &l) in predictions.iter().zip(labels) {
        if p >= k || l >= k {
            return Err(Error::Data(format!(
                "class index out of range: prediction {p}, label {l}, k = {k}"
            )));
        }
        confusion[l][p] += 1;
    }
    let n = predictions.len();
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let accuracy = correct as f64 / n as f64;

    let mut per_class_f1 = Vec::with_capacity(k);
    let mut degenerate_classes = Vec::new();
    for c in 0..k {
        let tp = confusion[c][c];
        let support: usize = confusion[c].iter().sum();
        let predicted: usize = (0..k).map(|r| confusion[r][c]).sum();
        if support == 0 && predicted == 0 {
            degenerate_classes.push(c);
            per_class_f1.push(0.0);
            continue;
        }
        let fn_ = support - tp;
        let fp = predicted - tp;
        let denom = 2 * tp + fp + fn_;
        // algebraically equal to 2PR/(P+R) and avoids 0/0 when tp = 0
        per_class_f1.push(if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        });
    }
    let macro_f1 = per_class_f1.iter().sum::<f64>() / k as f64;

    Ok(MetricsReport {
        accuracy,
        macro_f1,
        per_class_f1,
        confusion,
        n_samples: n,
        degenerate_classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions() {
        let labels = [0usize, 1, 2, 3, 4];
        let m = compute_metrics(&labels, &labels, 5).unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.macro_f1, 1.0);
        assert!(m.degenerate_classes.is_empty());
    }

    #[test]
    fn worked_binary_example() {
        let labels = [0usize, 0, 1, 1];
        let predictions = [0usize, 1, 1, 1];
        let m = compute_metrics(&predictions, &labels, 2).unwrap();
        assert!((m.accuracy - 0.75).abs() < 1e-12);
        assert!((m.per_class_f1[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.per_class_f1[1] - 0.8).abs() < 1e-12);
        assert!((m.macro_f1 - 11.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn constant_predictor_on_balanced_labels() {
        let labels: Vec<usize> = (0..5).flat_map(|c| std::iter::repeat_n(c, 10)).collect();
        let predictions = vec![2usize; 50];
        let m = compute_metrics(&predictions, &labels, 5).unwrap();
        assert!((m.accuracy - 0.2).abs() < 1e-12);
        // classes never predicted and present in labels are not degenerate
        assert!(m.degenerate_classes.is_empty());
    }

    #[test]
    fn flags_degenerate_classes() {
        let labels = [0usize, 1, 0, 1];
        let predictions = [0usize, 1, 1, 1];
        let m = compute_metrics(&predictions, &labels, 4).unwrap();
        assert_eq!(m.degenerate_classes, vec![2, 3]);
        assert_eq!(m.per_class_f1[2], 0.0);
        assert_eq!(m.per_class_f1[3], 0.0);
    }

    #[test]
    fn internal_consistency() {
        let labels = [0usize, 1, 2, 0, 1, 2, 2, 2];
        let predictions = [0usize, 2, 2, 1, 1, 0, 2, 2];
        let m = compute_metrics(&predictions, &labels, 3).unwrap();
        // row sums are per-class support
        let support: usize = m.confusion.iter().map(|r| r.iter().sum::<usize>()).sum();
        assert_eq!(support, m.n_samples);
        let trace: usize = (0..3).map(|c| m.confusion[c][c]).sum();
        assert!((m.accuracy - trace as f64 / m.n_samples as f64).abs() < 1e-12);
        let mf1 = m.per_class_f1.iter().sum::<f64>() / 3.0;
        assert!((m.macro_f1 - mf1).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(compute_metrics(&[], &[], 5).is_err());
        assert!(compute_metrics(&[0], &[0, 1], 5).is_err());
        assert!(compute_metrics(&[7], &[0], 5).is_err());
    }
}
