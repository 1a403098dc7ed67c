//! Consult supervisor automaton.
//!
//! ```text
//! Idle ──QueryReceived──▶ Interpreting ──Interpreted──▶ Diagnosing ──Diagnosed──▶ Prognosing
//!                                                                                    │
//! Answering ◀──Retrieved── Retrieving ◀──Planned── Planning ◀──────Prognosed─────────┘
//!     │
//!     └──Reset──▶ Idle            any ──Error──▶ Failed (absorbing)
//! ```
//!
//! Every other (state, event) pair is rejected. Stepping is by value: the
//! old state is left untouched.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ReasoningError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConsultState {
    Idle,
    Interpreting,
    Diagnosing,
    Prognosing,
    Planning,
    Retrieving,
    Answering,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SupervisorEvent {
    QueryReceived,
    Interpreted,
    Diagnosed,
    Prognosed,
    Planned,
    Retrieved,
    Error,
    Reset,
}

impl SupervisorEvent {
    pub const ALL: [SupervisorEvent; 8] = [
        SupervisorEvent::QueryReceived,
        SupervisorEvent::Interpreted,
        SupervisorEvent::Diagnosed,
        SupervisorEvent::Prognosed,
        SupervisorEvent::Planned,
        SupervisorEvent::Retrieved,
        SupervisorEvent::Error,
        SupervisorEvent::Reset,
    ];
}

impl fmt::Display for ConsultState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for SupervisorEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The transition table. `None` means the pair is rejected.
pub fn transition(state: ConsultState, event: SupervisorEvent) -> Option<ConsultState> {
    use ConsultState::*;
    use SupervisorEvent::*;
    match (state, event) {
        (_, Error) => Some(Failed),
        (Idle, QueryReceived) => Some(Interpreting),
        (Interpreting, Interpreted) => Some(Diagnosing),
        (Diagnosing, Diagnosed) => Some(Prognosing),
        (Prognosing, Prognosed) => Some(Planning),
        (Planning, Planned) => Some(Retrieving),
        (Retrieving, Retrieved) => Some(Answering),
        (Answering, Reset) => Some(Idle),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub state: ConsultState,
    /// Event that led into `state`; `None` for the initial entry.
    pub event: Option<SupervisorEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupervisorState {
    pub state: ConsultState,
    pub active_models: BTreeSet<String>,
    pub trace: Vec<TraceEntry>,
}

impl Default for SupervisorState {
    fn default() -> Self {
        SupervisorState {
            state: ConsultState::Idle,
            active_models: BTreeSet::new(),
            trace: vec![TraceEntry {
                state: ConsultState::Idle,
                event: None,
            }],
        }
    }
}

impl SupervisorState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn step(&self, event: SupervisorEvent) -> Result<Self, ReasoningError> {
        let next = transition(self.state, event).ok_or(ReasoningError::InvalidTransition {
            state: self.state,
            event,
        })?;
        let mut out = self.clone();
        out.state = next;
        out.trace.push(TraceEntry {
            state: next,
            event: Some(event),
        });
        if event == SupervisorEvent::Reset {
            // the situation changed: every model gives up its task
            out.active_models.clear();
        }
        Ok(out)
    }

    pub fn with_active_models(mut self, models: BTreeSet<String>) -> Self {
        self.active_models = models;
        self
    }

    pub fn states(&self) -> Vec<ConsultState> {
        self.trace.iter().map(|t| t.state).collect()
    }
}

/// Whether a trace starts at `Idle` and every entry follows the table.
pub fn is_lawful_trace(trace: &[TraceEntry]) -> bool {
    let Some(first) = trace.first() else {
        return false;
    };
    if first.state != ConsultState::Idle || first.event.is_some() {
        return false;
    }
    trace.windows(2).all(|w| match w[1].event {
        Some(event) => transition(w[0].state, event) == Some(w[1].state),
        None => false,
    })
}

/// Models whose capability tags intersect the task's tags.
pub fn model_bid(
    capabilities: &BTreeMap<String, BTreeSet<String>>,
    task: &BTreeSet<String>,
) -> BTreeSet<String> {
    capabilities
        .iter()
        .filter(|(_, caps)| !caps.is_disjoint(task))
        .map(|(name, _)| name.clone())
        .collect()
}
