//! Evaluation: signal-vertex recovery (ROC/AUC, false positive rate),
//! cross-validated screening-plus-classification pipelines, and the
//! simulation experiments.

mod cv;
mod experiment;
mod report;

pub use cv::{
    cross_validate, ClassifierSpec, CvReport, FoldRecord, Grouping, PipelineSpec, Selection,
};
pub use experiment::{
    derive_seed, plugin_name, run_experiment1, run_experiment2, AucRecord, Exp1Config, Exp2Config,
    ExperimentReport, FprRecord, IerMixture, LossRecord, Method, MethodSummary, BAYES, PLUGIN_FULL,
    PLUGIN_TRUE, SIGNAL_SIZE,
};
pub use report::{
    auc_csv, cv_loss_csv, fpr_csv, loss_csv, predictions_csv, roc_csv, screening_csv, summary_csv,
    summary_table, write_report_file, NA,
};

use crate::error::{Error, Result};
use crate::graph::VertexSet;

/// Receiver operating characteristic from a prefix sweep over a ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// `(fpr, tpr)` for prefix sizes `0..=n`.
    pub points: Vec<(f64, f64)>,
}

impl RocCurve {
    /// Trapezoid-rule area.
    pub fn area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) * 0.5)
            .sum()
    }
}

fn check_truth(truth: &VertexSet, n: usize) -> Result<()> {
    truth.check_within(n)?;
    if truth.is_empty() || truth.len() == n {
        return Err(Error::invalid(
            "true signal set must be non-empty and leave some vertices out",
        ));
    }
    Ok(())
}

/// ROC curve and AUC of `ranking` (best first) against the true signal set.
pub fn roc_auc(ranking: &[usize], truth: &VertexSet, n: usize) -> Result<(RocCurve, f64)> {
    check_truth(truth, n)?;
    if ranking.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: ranking.len(),
        });
    }
    let mut seen = vec![false; n];
    for &u in ranking {
        if u >= n || std::mem::replace(&mut seen[u], true) {
            return Err(Error::invalid(
                "ranking is not a permutation of the vertices",
            ));
        }
    }
    let positives = truth.len() as f64;
    let negatives = (n - truth.len()) as f64;
    let mut points = Vec::with_capacity(n + 1);
    points.push((0.0, 0.0));
    let (mut tp, mut fp) = (0usize, 0usize);
    for &u in ranking {
        if truth.contains(u) {
            tp += 1;
        } else {
            fp += 1;
        }
        points.push((fp as f64 / negatives, tp as f64 / positives));
    }
    let curve = RocCurve { points };
    let auc = curve.area();
    Ok((curve, auc))
}

/// Fraction of non-signal vertices that were selected.
pub fn fpr_at_size(selected: &VertexSet, truth: &VertexSet, n: usize) -> Result<f64> {
    check_truth(truth, n)?;
    selected.check_within(n)?;
    let false_pos = selected.iter().filter(|&&u| !truth.contains(u)).count();
    Ok(false_pos as f64 / (n - truth.len()) as f64)
}

/// Mean and standard error (sample standard deviation over `√len`). The
/// standard error is `None` for fewer than two values.
pub fn mean_and_se(values: &[f64]) -> (f64, Option<f64>) {
    let len = values.len() as f64;
    let mean = values.iter().sum::<f64>() / len;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0);
    (mean, Some((var / len).sqrt()))
}
