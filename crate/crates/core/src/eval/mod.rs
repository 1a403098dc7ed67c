//! Classification evaluation: k-fold cross-validation of a
//! similarity-weighted nearest-neighbour classifier over the case base,
//! confusion metrics, ROC curves and AUC.

mod classify;
mod metrics;
mod report;
mod roc;
mod split;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::casebase::{CaseBaseError, ClinicalCase};

pub use classify::{classify, run_cv, Classification, CvConfig, CvReport, FoldResult, LabeledCaseBase, ScoredCase};
pub use metrics::{metrics, ConfusionCounts, Metrics};
pub use report::{render_table, roc_csv};
pub use roc::{roc, RocCurve, RocPoint};
pub use split::{five_fold_split, k_fold_split};

/// Posterior above which a case is called positive. Equality is negative.
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("confusion counts are all zero")]
    EmptySample,
    #[error("dataset of {n} cases is too small for {needed}")]
    DatasetTooSmall { n: usize, needed: usize },
    #[error("need {k} neighbours but the training base holds {available}")]
    InsufficientNeighbors { k: usize, available: usize },
    #[error("ROC needs both classes; got {positives} positives and {negatives} negatives")]
    DegenerateLabels { positives: usize, negatives: usize },
    #[error("score {0} is not finite")]
    NonFiniteScore(f64),
    #[error("k_neighbors must be at least 1")]
    ZeroNeighbors,
    #[error(transparent)]
    CaseBase(#[from] CaseBaseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledCase {
    pub label: Label,
    pub case: ClinicalCase,
}

/// Parse a JSONL file of labeled cases.
pub fn parse_labeled_jsonl(text: &str) -> Result<Vec<LabeledCase>, CaseBaseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CaseBaseError::MalformedRecord {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn load_labeled(path: impl AsRef<std::path::Path>) -> Result<Vec<LabeledCase>, CaseBaseError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| CaseBaseError::IoFailure(format!("{}: {e}", path.display())))?;
    parse_labeled_jsonl(&text)
}
