//! The decision-support shell: configuration, loaded knowledge, the consult
//! pipeline and the HTTP API.
//!
//! Interpreter, inference engine and repository run in-process behind one
//! API; module boundaries follow the crate layout.

mod config;
mod consult;
pub mod http;

use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

use crate::casebase::{self, CaseBase, CaseBaseError, CaseStore};
use crate::interpreter::{Lexicon, Stopwords};
use crate::ontology::{Ontology, OntologyError};
use crate::reasoning::{ReasoningError, RuleBook};
use crate::similarity::SimilarityWeights;

pub use config::Config;
pub use http::{evaluate, EvaluateResponse};
pub use consult::{
    consult, default_model_capabilities, ConsultAnswer, ConsultError, ConsultRequest, DiagnosisHit,
    ErrorCode, SimilarCase,
};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    CaseBase(#[from] CaseBaseError),
    #[error(transparent)]
    Rules(#[from] ReasoningError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Everything a consult reads: ontology, case store, rule tables, lexicons
/// and scoring parameters.
#[derive(Debug)]
pub struct Knowledge {
    pub ontology: Option<Arc<Ontology>>,
    pub cases: CaseStore,
    pub rules: Arc<RuleBook>,
    pub lexicon: Lexicon,
    pub stopwords: Stopwords,
    pub weights: SimilarityWeights,
    pub k_default: usize,
    /// Where accepted cases are persisted, if anywhere.
    pub case_store_path: Option<PathBuf>,
}

impl Knowledge {
    /// Assemble knowledge from parts. The rule book's sign phrases join the
    /// interpreter lexicon so they are matched as whole phrases.
    pub fn new(
        ontology: Option<Ontology>,
        cases: CaseBase,
        rules: RuleBook,
        mut lexicon: Lexicon,
        stopwords: Stopwords,
    ) -> Self {
        lexicon.extend(rules.sign_phrases());
        Knowledge {
            ontology: ontology.map(Arc::new),
            cases: CaseStore::new(cases),
            rules: Arc::new(rules),
            lexicon,
            stopwords,
            weights: SimilarityWeights::default(),
            k_default: 5,
            case_store_path: None,
        }
    }

    /// Load every artefact named in `cfg`. A missing case store file is
    /// treated as an empty base.
    pub fn load(cfg: &Config) -> Result<Self, ServiceError> {
        let ontology = Ontology::load(&cfg.ontology_path)?;
        let cases = if cfg.case_store_path.exists() {
            casebase::load_checked(&cfg.case_store_path, &ontology)?
        } else {
            CaseBase::new()
        };
        let rules = RuleBook::load_dir(&cfg.rules_dir)?;
        let read_io = |path: PathBuf| move |source| ServiceError::Io { path, source };
        let lexicon = Lexicon::load(cfg.lexicon_path()).map_err(read_io(cfg.lexicon_path()))?;
        let stopwords =
            Stopwords::load(cfg.stopwords_path()).map_err(read_io(cfg.stopwords_path()))?;
        let mut k = Knowledge::new(Some(ontology), cases, rules, lexicon, stopwords);
        k.weights = cfg.weights;
        k.k_default = cfg.k_default;
        k.case_store_path = Some(cfg.case_store_path.clone());
        Ok(k)
    }

    /// Knowledge over the fixtures bundled with the crate.
    pub fn bundled() -> Result<Self, ServiceError> {
        let mut k = Self::load(&Config::bundled())?;
        // never write back into the shipped fixture
        k.case_store_path = None;
        Ok(k)
    }
}
