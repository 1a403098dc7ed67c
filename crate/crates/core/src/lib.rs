//! Ontology-backed case-based reasoning for oncology consults.
//!
//! The crate is organised the way the decision-support pipeline runs:
//!
//! * [`ontology`] parses OBO disease ontologies and answers inheritance,
//!   matching and Wu–Palmer similarity queries.
//! * [`casebase`] stores clinical cases (problem, environment, result and the
//!   diagnosis / prognosis / treatment directories) behind a keyword index.
//! * [`similarity`] scores a query case against stored cases and ranks them.
//! * [`interpreter`] turns free text into a normalized query case.
//! * [`reasoning`] holds the sign → diagnosis and diagnosis → therapy rule
//!   tables, prognosis aggregation and the consult supervisor automaton.
//! * [`eval`] runs k-fold cross-validation, confusion metrics and ROC/AUC.
//! * [`service`] wires everything into a consult pipeline, an HTTP API and
//!   the `oncodss` command line.
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory.

pub mod casebase;
pub mod cli;
pub mod eval;
pub mod interpreter;
pub mod ontology;
pub mod reasoning;
pub mod service;
pub mod similarity;
pub mod text;

use std::path::PathBuf;

/// Directory holding the fixtures that ship with the crate.
pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}
