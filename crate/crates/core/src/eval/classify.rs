use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{k_fold_split, metrics, ConfusionCounts, EvalError, Label, LabeledCase, Metrics, DECISION_THRESHOLD};
use crate::casebase::{CaseBase, ClinicalCase};
use crate::ontology::Ontology;
use crate::similarity::{retrieve_top_k, SimilarityOptions, SimilarityWeights};

/// Case base whose cases carry a class label.
#[derive(Debug, Clone, Default)]
pub struct LabeledCaseBase {
    cases: CaseBase,
    labels: HashMap<String, Label>,
}

impl LabeledCaseBase {
    pub fn build<'a>(data: impl IntoIterator<Item = &'a LabeledCase>) -> Result<Self, EvalError> {
        let mut out = LabeledCaseBase::default();
        for lc in data {
            out.cases.add_case(lc.case.clone(), None)?;
            out.labels.insert(lc.case.case_id.clone(), lc.label);
        }
        Ok(out)
    }

    pub fn cases(&self) -> &CaseBase {
        &self.cases
    }

    pub fn label(&self, case_id: &str) -> Option<Label> {
        self.labels.get(case_id).copied()
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub posterior: f64,
    pub label: Label,
}

/// Similarity-weighted vote of the `k` nearest labeled cases.
///
/// The posterior is the share of neighbour similarity held by positive
/// neighbours. When every neighbour scores zero it falls back to the plain
/// share of positive neighbours.
pub fn classify(
    query: &ClinicalCase,
    training: &LabeledCaseBase,
    weights: &SimilarityWeights,
    o: &Ontology,
    k: usize,
    use_ontology: bool,
) -> Result<Classification, EvalError> {
    if k == 0 {
        return Err(EvalError::ZeroNeighbors);
    }
    if training.len() < k {
        return Err(EvalError::InsufficientNeighbors {
            k,
            available: training.len(),
        });
    }
    let neighbours = retrieve_top_k(
        training.cases(),
        query,
        k,
        weights,
        o,
        SimilarityOptions { use_ontology },
    );
    let is_pos = |case_id: &str| training.label(case_id) == Some(Label::Positive);
    let total: f64 = neighbours.iter().map(|n| n.score).sum();
    let posterior = if total > 0.0 {
        let positive: f64 = neighbours.iter().filter(|n| is_pos(&n.case_id)).map(|n| n.score).sum();
        positive / total
    } else {
        neighbours.iter().filter(|n| is_pos(&n.case_id)).count() as f64 / neighbours.len() as f64
    };
    let label = if posterior > DECISION_THRESHOLD {
        Label::Positive
    } else {
        Label::Negative
    };
    Ok(Classification { posterior, label })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub k_neighbors: usize,
    pub weights: SimilarityWeights,
    pub use_ontology: bool,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 5,
            k_neighbors: 5,
            weights: SimilarityWeights::default(),
            use_ontology: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCase {
    pub case_id: String,
    pub fold: usize,
    pub posterior: f64,
    pub truth: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub n_test: usize,
    pub counts: ConfusionCounts,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<FoldResult>,
    /// Unweighted mean of the per-fold accuracies.
    pub mean_accuracy: f64,
    pub scored: Vec<ScoredCase>,
}

/// Minimum dataset size accepted by [`run_cv`].
pub const MIN_CV_CASES: usize = 10;

/// Cross-validate: each fold in turn is the test set, the rest the training
/// base. Folds run in parallel and are merged in fold order.
pub fn run_cv(data: &[LabeledCase], config: &CvConfig, o: &Ontology) -> Result<CvReport, EvalError> {
    if data.len() < MIN_CV_CASES {
        return Err(EvalError::DatasetTooSmall {
            n: data.len(),
            needed: MIN_CV_CASES,
        });
    }
    let folds = k_fold_split(data.len(), config.folds, config.seed)?;

    let run_fold = |f: usize| -> Result<(FoldResult, Vec<ScoredCase>), EvalError> {
        let test = &folds[f];
        let training = LabeledCaseBase::build(
            folds
                .iter()
                .enumerate()
                .filter(|(g, _)| *g != f)
                .flat_map(|(_, idx)| idx.iter().map(|&i| &data[i])),
        )?;
        let mut counts = ConfusionCounts::default();
        let mut scored = Vec::with_capacity(test.len());
        for &i in test {
            let lc = &data[i];
            let c = classify(&lc.case, &training, &config.weights, o, config.k_neighbors, config.use_ontology)?;
            counts.record(c.label == Label::Positive, lc.label == Label::Positive);
            scored.push(ScoredCase {
                case_id: lc.case.case_id.clone(),
                fold: f,
                posterior: c.posterior,
                truth: lc.label,
            });
        }
        Ok((
            FoldResult {
                n_test: test.len(),
                counts,
                metrics: metrics(&counts)?,
            },
            scored,
        ))
    };

    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..folds.len()).map(|f| s.spawn(move || run_fold(f))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fold worker panicked"))
            .collect()
    });

    let mut report = CvReport {
        folds: Vec::with_capacity(folds.len()),
        mean_accuracy: 0.0,
        scored: Vec::with_capacity(data.len()),
    };
    for r in results {
        let (fold, scored) = r?;
        report.folds.push(fold);
        report.scored.extend(scored);
    }
    report.mean_accuracy =
        report.folds.iter().map(|f| f.metrics.accuracy).sum::<f64>() / report.folds.len() as f64;
    Ok(report)
}
