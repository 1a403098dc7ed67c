//! Case base: clinical cases keyed by id with an inverted keyword index.
//!
//! Each case carries its problem (`PB`), environment (`E`) and result (`R`)
//! descriptors together with the diagnosis, prognosis, treatment and
//! supporting-treatment directories. All directories share one keyword index
//! built from `PB` keywords and `E` findings; the index is derived state and
//! is rebuilt on load rather than persisted.

mod case;
mod persist;
mod store;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ontology::Ontology;
use crate::text::normalize_keyword;

pub use case::{
    CaseDates, CaseResult, ClinicalCase, Diagnosis, DiagnosisCode, Outcome, PatientRecord, Problem,
    Sex, TreatmentKind, TreatmentRound, MAX_AGE,
};
pub use persist::{load, load_checked, parse_jsonl, save};
pub use store::CaseStore;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CaseBaseError {
    #[error("case {0} already exists")]
    DuplicateId(String),
    #[error("case {case_id} is invalid: {reason}")]
    InvalidCase { case_id: String, reason: String },
    #[error("case {case_id} names diagnosis term {term} which is not in the ontology")]
    UnknownDiagnosisTerm { case_id: String, term: String },
    #[error("no case with id {0}")]
    UnknownCase(String),
    #[error("i/o failure: {0}")]
    IoFailure(String),
    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
}

#[derive(Debug, Clone, Default)]
pub struct CaseBase {
    cases: BTreeMap<String, ClinicalCase>,
    keyword_index: BTreeMap<String, BTreeSet<String>>,
    revision: u64,
}

impl CaseBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn get(&self, case_id: &str) -> Option<&ClinicalCase> {
        self.cases.get(case_id)
    }

    /// Cases in id order.
    pub fn cases(&self) -> impl Iterator<Item = &ClinicalCase> {
        self.cases.values()
    }

    /// Normalize, validate and store a case. When an ontology is supplied the
    /// diagnosis term must be one of its live terms.
    pub fn add_case(
        &mut self,
        mut case: ClinicalCase,
        ontology: Option<&Ontology>,
    ) -> Result<u64, CaseBaseError> {
        case.normalize();
        case.validate().map_err(|reason| CaseBaseError::InvalidCase {
            case_id: case.case_id.clone(),
            reason,
        })?;
        if self.cases.contains_key(&case.case_id) {
            return Err(CaseBaseError::DuplicateId(case.case_id));
        }
        if let (Some(o), Some(term)) = (ontology, &case.diagnosis.term_id) {
            if o.term(term).is_none() {
                return Err(CaseBaseError::UnknownDiagnosisTerm {
                    case_id: case.case_id.clone(),
                    term: term.clone(),
                });
            }
        }
        for kw in case.index_keywords() {
            self.keyword_index
                .entry(kw.clone())
                .or_default()
                .insert(case.case_id.clone());
        }
        self.cases.insert(case.case_id.clone(), case);
        self.revision += 1;
        Ok(self.revision)
    }

    pub fn remove_case(&mut self, case_id: &str) -> Result<ClinicalCase, CaseBaseError> {
        let case = self
            .cases
            .remove(case_id)
            .ok_or_else(|| CaseBaseError::UnknownCase(case_id.to_string()))?;
        for kw in case.index_keywords() {
            if let Some(ids) = self.keyword_index.get_mut(kw) {
                ids.remove(case_id);
                if ids.is_empty() {
                    self.keyword_index.remove(kw);
                }
            }
        }
        self.revision += 1;
        Ok(case)
    }

    /// Ids of cases indexed under `keyword` after normalization.
    pub fn lookup_by_keyword(&self, keyword: &str) -> BTreeSet<String> {
        self.keyword_index
            .get(&normalize_keyword(keyword))
            .cloned()
            .unwrap_or_default()
    }

    pub fn keywords(&self) -> impl Iterator<Item = &str> {
        self.keyword_index.keys().map(String::as_str)
    }

    /// Whether the keyword index equals a fresh inversion of the stored cases.
    pub fn index_is_consistent(&self) -> bool {
        let mut rebuilt: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for case in self.cases.values() {
            for kw in case.index_keywords() {
                rebuilt.entry(kw.clone()).or_default().insert(case.case_id.clone());
            }
        }
        rebuilt == self.keyword_index
    }

    /// Case-for-case equality, ignoring revision.
    pub fn same_cases(&self, other: &CaseBase) -> bool {
        self.cases == other.cases
    }
}
