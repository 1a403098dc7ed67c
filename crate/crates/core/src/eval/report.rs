use std::fmt::Write;

use super::{CvReport, RocCurve};

fn ratio(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.2}"))
}

/// Per-fold table in the column order of the reference evaluation tables.
pub fn render_table(report: &CvReport) -> String {
    let mut out = String::from(
        "No. of test samples\tTP\tFP\tTN\tFN\tFP/(FP+TN)\tTP/(TP+FN)\tAccuracy\n",
    );
    for fold in &report.folds {
        let c = &fold.counts;
        let m = &fold.metrics;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.2}%",
            fold.n_test,
            c.tp,
            c.fp,
            c.tn,
            c.fn_,
            ratio(m.fpr),
            ratio(m.tpr),
            m.accuracy * 100.0
        );
    }
    let _ = writeln!(out, "Average Accuracy\t{:.2}%", report.mean_accuracy * 100.0);
    out
}

/// `fpr,tpr,threshold` rows for plotting.
pub fn roc_csv(curve: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr,threshold\n");
    for p in &curve.points {
        let threshold = p.threshold.map(|t| t.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{}", p.fpr, p.tpr, threshold);
    }
    out
}
