use serde::{Deserialize, Serialize};

use super::{EvalError, Label};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Score at which this point is reached; `None` for the (0,0) anchor.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

impl RocCurve {
    /// Trapezoidal area recomputed from the stored points.
    pub fn trapezoid_area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
            .sum()
    }
}

/// ROC curve over every distinct score, highest first. Equal scores form a
/// single step. AUC is the trapezoidal area, accumulated in integer counts
/// so it carries no rounding beyond the final division.
pub fn roc(scored: &[(f64, Label)]) -> Result<RocCurve, EvalError> {
    if let Some((s, _)) = scored.iter().find(|(s, _)| !s.is_finite()) {
        return Err(EvalError::NonFiniteScore(*s));
    }
    let positives = scored.iter().filter(|(_, l)| *l == Label::Positive).count() as u64;
    let negatives = scored.len() as u64 - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::DegenerateLabels {
            positives: positives as usize,
            negatives: negatives as usize,
        });
    }

    let mut sorted: Vec<(f64, Label)> = scored.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: None,
    }];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut area2: u128 = 0;
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].0;
        let (tp0, fp0) = (tp, fp);
        while i < sorted.len() && sorted[i].0 == threshold {
            match sorted[i].1 {
                Label::Positive => tp += 1,
                Label::Negative => fp += 1,
            }
            i += 1;
        }
        area2 += u128::from(fp - fp0) * u128::from(tp + tp0);
        points.push(RocPoint {
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
            threshold: Some(threshold),
        });
    }
    // the lowest threshold admits every case, so the curve already ends at (1,1)
    debug_assert_eq!((tp, fp), (positives, negatives));

    let auc = area2 as f64 / (2 * u128::from(positives) * u128::from(negatives)) as f64;
    Ok(RocCurve { points, auc })
}
