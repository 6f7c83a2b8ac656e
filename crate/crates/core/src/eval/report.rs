//! CSV and text renderings of screening runs and experiment reports.
//!
//! Floats use Rust's shortest round-trip formatting and rows follow the
//! record order, so equal reports render to identical bytes. Standard errors
//! of single-repeat summaries print as `NA`.

use std::path::Path;

use super::cv::CvReport;
use super::experiment::{ExperimentReport, MethodSummary};
use crate::error::{Error, Result};
use crate::graph::LabeledGraphDataset;
use crate::screen::{vertex_ranking, ScreeningResult};

pub const NA: &str = "NA";

fn render(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // writes into memory cannot fail
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn se_text(se: Option<f64>) -> String {
    se.map_or_else(|| NA.to_string(), |v| v.to_string())
}

/// `vertex,score,rank,selected,eliminated_at`; rank is 1-based, and
/// `eliminated_at` is empty for survivors and one-shot runs.
pub fn screening_csv(result: &ScreeningResult, ds: &LabeledGraphDataset) -> String {
    let mut rank = vec![0usize; result.n];
    for (r, &u) in vertex_ranking(result).iter().enumerate() {
        rank[u] = r + 1;
    }
    render(
        &["vertex", "score", "rank", "selected", "eliminated_at"],
        (0..result.n).map(|u| {
            vec![
                ds.vertex_name(u),
                result.scores[u].to_string(),
                rank[u].to_string(),
                u8::from(result.selected.contains(u)).to_string(),
                result.elimination[u].map_or_else(String::new, |k| k.to_string()),
            ]
        }),
    )
}

/// `method,repeat,auc`.
pub fn auc_csv(report: &ExperimentReport) -> String {
    render(
        &["method", "repeat", "auc"],
        report
            .auc
            .iter()
            .map(|r| vec![r.method.clone(), r.repeat.to_string(), r.auc.to_string()]),
    )
}

/// `method,m,repeat,fpr`.
pub fn fpr_csv(report: &ExperimentReport) -> String {
    render(
        &["method", "m", "repeat", "fpr"],
        report.fpr.iter().map(|r| {
            vec![
                r.method.clone(),
                r.m.to_string(),
                r.repeat.to_string(),
                r.fpr.to_string(),
            ]
        }),
    )
}

/// `method,m,repeat,error`.
pub fn loss_csv(report: &ExperimentReport) -> String {
    render(
        &["method", "m", "repeat", "error"],
        report.loss.iter().map(|r| {
            vec![
                r.method.clone(),
                r.m.to_string(),
                r.repeat.to_string(),
                r.error.to_string(),
            ]
        }),
    )
}

/// `method,fpr,tpr`.
pub fn roc_csv(report: &ExperimentReport) -> String {
    render(
        &["method", "fpr", "tpr"],
        report.roc.iter().flat_map(|(name, curve)| {
            curve
                .points
                .iter()
                .map(move |(f, t)| vec![name.clone(), f.to_string(), t.to_string()])
        }),
    )
}

/// `method,m,metric,mean,se,repeats`.
pub fn summary_csv(summary: &[MethodSummary]) -> String {
    render(
        &["method", "m", "metric", "mean", "se", "repeats"],
        summary.iter().map(|s| {
            vec![
                s.method.clone(),
                s.m.to_string(),
                s.metric.to_string(),
                s.mean.to_string(),
                se_text(s.se),
                s.repeats.to_string(),
            ]
        }),
    )
}

/// Aligned text table of a summary, with mean wall-clock seconds where
/// timed.
pub fn summary_table(summary: &[MethodSummary]) -> String {
    let header = ["method", "m", "metric", "mean", "se", "repeats", "seconds"];
    let rows: Vec<[String; 7]> = summary
        .iter()
        .map(|s| {
            [
                s.method.clone(),
                s.m.to_string(),
                s.metric.to_string(),
                format!("{:.4}", s.mean),
                s.se.map_or_else(|| NA.to_string(), |v| format!("{v:.4}")),
                s.repeats.to_string(),
                s.seconds
                    .map_or_else(|| "-".to_string(), |v| format!("{v:.3}")),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for row in &rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

/// `fold,graph_id,label,predicted,correct,unseen_class,selected_size`.
pub fn predictions_csv(report: &CvReport, ds: &LabeledGraphDataset) -> String {
    render(
        &[
            "fold",
            "graph_id",
            "label",
            "predicted",
            "correct",
            "unseen_class",
            "selected_size",
        ],
        report.folds.iter().flat_map(|f| {
            f.held_out.iter().zip(&f.predictions).map(move |(&i, &p)| {
                let y = ds.labels()[i];
                vec![
                    f.name.clone(),
                    ds.graph_ids()[i].clone(),
                    y.to_string(),
                    p.to_string(),
                    u8::from(y == p).to_string(),
                    u8::from(f.unseen_class).to_string(),
                    f.selected.len().to_string(),
                ]
            })
        }),
    )
}

/// `folds,total,misclassified,error,se`.
pub fn cv_loss_csv(report: &CvReport) -> String {
    let l = &report.loss;
    render(
        &["folds", "total", "misclassified", "error", "se"],
        [vec![
            l.folds.to_string(),
            l.total.to_string(),
            l.misclassified.to_string(),
            l.error.to_string(),
            l.standard_error.to_string(),
        ]],
    )
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_report_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    crate::graph::io::write_file(&dir.join(name), contents)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::experiment::AucRecord;

    fn summary(se: Option<f64>) -> MethodSummary {
        MethodSummary {
            method: "Dcorr".into(),
            m: 100,
            metric: "auc",
            mean: 0.8,
            se,
            repeats: 1,
            seconds: Some(0.25),
        }
    }

    #[test]
    fn single_repeat_se_is_na() {
        let csv = summary_csv(&[summary(None)]);
        assert_eq!(
            csv,
            "method,m,metric,mean,se,repeats\nDcorr,100,auc,0.8,NA,1\n"
        );
        assert!(summary_table(&[summary(None)]).contains("NA"));
        assert!(summary_csv(&[summary(Some(0.01))]).contains(",0.01,"));
    }

    #[test]
    fn auc_rows_follow_records() {
        let report = ExperimentReport {
            auc: vec![AucRecord {
                method: "RV".into(),
                repeat: 0,
                auc: 0.5,
                seconds: 9.0,
            }],
            ..Default::default()
        };
        assert_eq!(auc_csv(&report), "method,repeat,auc\nRV,0,0.5\n");
    }
}
