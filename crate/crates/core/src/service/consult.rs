//! The consult pipeline.
//!
//! | supervisor state | work done                                            |
//! |------------------|------------------------------------------------------|
//! | `Interpreting`   | request validation, text extraction, query case      |
//! | `Diagnosing`     | sign derivation and rule-based diagnosis             |
//! | `Prognosing`     | top-k retrieval and outcome aggregation              |
//! | `Planning`       | therapy rows for every matched `D1`..`D6`            |
//! | `Retrieving`     | full bodies of the ranked precedents                 |
//!
//! Any failure moves the supervisor to `Failed` and is returned with the
//! trace so far.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Knowledge;
use crate::casebase::{ClinicalCase, DiagnosisCode, PatientRecord};
use crate::interpreter::{build_query_case, extract, MatchedTerm};
use crate::reasoning::{
    model_bid, prognose, ConsultState, Prognosis, Sign, SupervisorEvent, SupervisorState,
    TherapyRule, TraceEntry,
};
use crate::similarity::{retrieve_top_k, RankedCase, SimilarityOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsultRequest {
    #[serde(default)]
    pub text: String,
    pub patient: PatientRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosisHit {
    pub code: DiagnosisCode,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarCase {
    #[serde(flatten)]
    pub ranked: RankedCase,
    pub case: ClinicalCase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsultAnswer {
    pub diagnoses: Vec<DiagnosisHit>,
    pub signs: BTreeSet<Sign>,
    pub therapy: Vec<TherapyRule>,
    pub prognosis: Prognosis,
    pub similar_cases: Vec<SimilarCase>,
    pub supervisor_trace: Vec<TraceEntry>,
    pub active_models: BTreeSet<String>,
    pub ontology_matches: Vec<MatchedTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    OntologyNotLoaded,
    InvalidRequest,
    RuleFailure,
    CaseBaseFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, thiserror::Error)]
#[error("{message} (supervisor in {fsa_state})")]
pub struct ConsultError {
    pub code: ErrorCode,
    pub message: String,
    pub fsa_state: ConsultState,
    pub trace: Vec<TraceEntry>,
}

/// Models available to the supervisor and the task tags each one accepts.
pub fn default_model_capabilities() -> BTreeMap<String, BTreeSet<String>> {
    let tags = |t: &[&str]| t.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    BTreeMap::from([
        ("SAT-Δ".to_string(), tags(&["diagnosis"])),
        ("SAT-Π".to_string(), tags(&["prognosis"])),
        ("SAT-Θ".to_string(), tags(&["treatment"])),
        ("CBR".to_string(), tags(&["retrieval", "prognosis"])),
    ])
}

struct Run {
    sup: SupervisorState,
}

impl Run {
    fn advance(&mut self, event: SupervisorEvent) {
        self.sup = self
            .sup
            .step(event)
            .expect("pipeline follows the transition table");
    }

    fn fail(mut self, code: ErrorCode, message: impl Into<String>) -> ConsultError {
        self.advance(SupervisorEvent::Error);
        ConsultError {
            code,
            message: message.into(),
            fsa_state: self.sup.state,
            trace: self.sup.trace,
        }
    }
}

pub fn consult(req: &ConsultRequest, k: &Knowledge) -> Result<ConsultAnswer, ConsultError> {
    let mut run = Run {
        sup: SupervisorState::new(),
    };
    let Some(ontology) = k.ontology.as_deref() else {
        return Err(run.fail(ErrorCode::OntologyNotLoaded, "ontology is not loaded"));
    };

    run.advance(SupervisorEvent::QueryReceived);
    let task: BTreeSet<String> = ["diagnosis", "prognosis", "treatment", "retrieval"]
        .into_iter()
        .map(String::from)
        .collect();
    run.sup = run
        .sup
        .clone()
        .with_active_models(model_bid(&default_model_capabilities(), &task));

    if let Err(reason) = req.patient.validate() {
        return Err(run.fail(ErrorCode::InvalidRequest, reason));
    }
    let top_k = req.k.unwrap_or(k.k_default);
    if top_k == 0 {
        return Err(run.fail(ErrorCode::InvalidRequest, "k must be at least 1"));
    }
    let bundle = extract(&req.text, ontology, &k.lexicon, &k.stopwords);
    let mut record = req.patient.clone();
    record.findings = record
        .findings
        .iter()
        .map(|f| crate::text::normalize_keyword(f))
        .filter(|f| !f.is_empty())
        .collect();
    let query = build_query_case(&bundle, record, req.stage.as_deref(), ontology);
    run.advance(SupervisorEvent::Interpreted);

    let signs = k.rules.signs_for(
        query.index_keywords().map(String::as_str),
        query.diagnosis.stage.as_deref(),
    );
    let diagnoses = match k.rules.diagnose(&signs) {
        Ok(d) => d,
        Err(e) => return Err(run.fail(ErrorCode::RuleFailure, e.to_string())),
    };
    run.advance(SupervisorEvent::Diagnosed);

    let snapshot = k.cases.snapshot();
    let vacuous = query.problem.keywords.is_empty()
        && query.environment.findings.is_empty()
        && query.diagnosis.term_id.is_none();
    let ranked: Vec<RankedCase> = if vacuous {
        Vec::new()
    } else {
        retrieve_top_k(
            &snapshot,
            &query,
            top_k,
            &k.weights,
            ontology,
            SimilarityOptions::default(),
        )
    };
    let prognosis = match prognose(&ranked, &snapshot) {
        Ok(p) => p,
        Err(e) => return Err(run.fail(ErrorCode::CaseBaseFailure, e.to_string())),
    };
    run.advance(SupervisorEvent::Prognosed);

    let mut therapy: Vec<TherapyRule> = Vec::new();
    for (code, _) in diagnoses.iter().filter(|(c, _)| *c != DiagnosisCode::D0) {
        match k.rules.plan_treatment(*code) {
            Ok(rule) if !therapy.contains(rule) => therapy.push(rule.clone()),
            Ok(_) => {}
            Err(e) => return Err(run.fail(ErrorCode::RuleFailure, e.to_string())),
        }
    }
    run.advance(SupervisorEvent::Planned);

    let mut similar_cases = Vec::with_capacity(ranked.len());
    for r in ranked {
        match snapshot.get(&r.case_id) {
            Some(case) => similar_cases.push(SimilarCase {
                case: case.clone(),
                ranked: r,
            }),
            None => {
                return Err(run.fail(
                    ErrorCode::CaseBaseFailure,
                    format!("case {} vanished from the snapshot", r.case_id),
                ))
            }
        }
    }
    run.advance(SupervisorEvent::Retrieved);
    debug_assert_eq!(run.sup.state, ConsultState::Answering);

    Ok(ConsultAnswer {
        diagnoses: diagnoses
            .into_iter()
            .map(|(code, label)| DiagnosisHit { code, label })
            .collect(),
        signs,
        therapy,
        prognosis,
        similar_cases,
        supervisor_trace: run.sup.trace,
        active_models: run.sup.active_models,
        ontology_matches: bundle.matched_terms,
    })
}
