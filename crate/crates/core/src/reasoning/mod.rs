//! Medical reasoning: diagnosis inference, therapy planning, prognosis and
//! the supervisor that sequences a consult.

mod prognosis;
mod rules;
mod supervisor;

use thiserror::Error;

pub use prognosis::{prognose, Prognosis};
pub use rules::{
    diagnose, BreastStage, DiagnosisRule, Modality, Requirement, RuleBook, RuleScope, Sign,
    TherapyCode, TherapyRule,
};
pub use supervisor::{
    is_lawful_trace, model_bid, transition, ConsultState, SupervisorEvent, SupervisorState,
    TraceEntry,
};

pub use crate::casebase::DiagnosisCode;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReasoningError {
    #[error("diagnosis rule set is empty")]
    EmptyRuleSet,
    #[error("invalid rule set: {0}")]
    InvalidRuleSet(String),
    #[error("no therapy row for diagnosis code {0}")]
    UnknownDiagnosisCode(String),
    #[error("unknown stage {0:?}")]
    UnknownStage(String),
    #[error("case {0} is not in the case base")]
    UnknownCaseId(String),
    #[error("event {event} is not allowed in state {state}")]
    InvalidTransition {
        state: ConsultState,
        event: SupervisorEvent,
    },
    #[error("cannot read rules: {0}")]
    Io(String),
}
