//! Case-to-case similarity and top-k retrieval.
//!
//! A query is compared with a stored case on four facets:
//!
//! | facet       | measure                                                        |
//! |-------------|----------------------------------------------------------------|
//! | `diagnosis` | Wu–Palmer similarity of the two diagnosis terms                |
//! | `keywords`  | Jaccard overlap of keyword sets expanded through the ontology  |
//! | `age`       | `1 - |a1 - a2| / 100`, clamped to `[0, 1]`                     |
//! | `stage`     | 1 for equal labels, 0.5 for same numeral (IIIa/IIIb), else 0   |
//!
//! Keyword expansion adds, for every keyword that resolves to an ontology
//! term, the names of that term and of its ancestors up to two `is_a` hops
//! away. With the ontology switched off there is no expansion and the
//! diagnosis facet is an exact term-id match.
//!
//! A facet whose inputs are missing on either side scores 0 and is listed in
//! `missing`; weights are not renormalized around it.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::casebase::{CaseBase, ClinicalCase};
use crate::ontology::{Ontology, OntologyError};
use crate::text::normalize_keyword;

/// Scale for the age facet, in years.
pub const AGE_SCALE: f64 = 100.0;

/// Ancestor hops followed when expanding keywords.
pub const EXPANSION_HOPS: u32 = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimilarityError {
    #[error("weights must be finite and non-negative, got {0:?}")]
    NegativeWeight([f64; 4]),
    #[error("at least one weight must be positive")]
    AllZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Facet {
    Diagnosis,
    Keywords,
    Age,
    Stage,
}

impl Facet {
    pub const ALL: [Facet; 4] = [Facet::Diagnosis, Facet::Keywords, Facet::Age, Facet::Stage];
}

/// Facet weights, normalized to sum to 1.
///
/// Serialized as `[diagnosis, keywords, age, stage]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct SimilarityWeights {
    diagnosis: f64,
    keywords: f64,
    age: f64,
    stage: f64,
}

impl SimilarityWeights {
    pub fn new(diagnosis: f64, keywords: f64, age: f64, stage: f64) -> Result<Self, SimilarityError> {
        let raw = [diagnosis, keywords, age, stage];
        if raw.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(SimilarityError::NegativeWeight(raw));
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(SimilarityError::AllZero);
        }
        Ok(SimilarityWeights {
            diagnosis: diagnosis / total,
            keywords: keywords / total,
            age: age / total,
            stage: stage / total,
        })
    }

    pub fn get(&self, facet: Facet) -> f64 {
        match facet {
            Facet::Diagnosis => self.diagnosis,
            Facet::Keywords => self.keywords,
            Facet::Age => self.age,
            Facet::Stage => self.stage,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.diagnosis, self.keywords, self.age, self.stage]
    }
}

impl Default for SimilarityWeights {
    fn default() -> Self {
        SimilarityWeights::new(0.4, 0.4, 0.1, 0.1).expect("default weights are valid")
    }
}

impl TryFrom<[f64; 4]> for SimilarityWeights {
    type Error = SimilarityError;

    fn try_from(w: [f64; 4]) -> Result<Self, Self::Error> {
        SimilarityWeights::new(w[0], w[1], w[2], w[3])
    }
}

impl From<SimilarityWeights> for [f64; 4] {
    fn from(w: SimilarityWeights) -> Self {
        w.as_array()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimilarityOptions {
    /// Synonym/ancestor expansion and Wu–Palmer diagnosis scoring.
    pub use_ontology: bool,
}

impl Default for SimilarityOptions {
    fn default() -> Self {
        SimilarityOptions { use_ontology: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetScores {
    pub scores: BTreeMap<Facet, f64>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub missing: BTreeSet<Facet>,
}

impl FacetScores {
    pub fn get(&self, facet: Facet) -> f64 {
        self.scores.get(&facet).copied().unwrap_or(0.0)
    }

    pub fn weighted(&self, weights: &SimilarityWeights) -> f64 {
        let total: f64 = Facet::ALL.iter().map(|f| weights.get(*f) * self.get(*f)).sum();
        total.clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCase {
    pub case_id: String,
    pub score: f64,
    pub component_scores: BTreeMap<Facet, f64>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub missing: BTreeSet<Facet>,
}

/// Keyword set of a case (`PB` keywords and `E` findings), optionally
/// expanded through the ontology.
pub fn expanded_keywords(case: &ClinicalCase, o: &Ontology, opts: SimilarityOptions) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for kw in case.index_keywords() {
        out.insert(kw.clone());
        if !opts.use_ontology {
            continue;
        }
        if let Some(res) = o.resolve(kw) {
            for id in o.ancestors_within(&res.id, EXPANSION_HOPS).unwrap_or_default() {
                if let Some(term) = o.term(id) {
                    out.insert(normalize_keyword(&term.name));
                }
            }
        }
    }
    out
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> Option<f64> {
    let union = a.union(b).count();
    if union == 0 {
        return None;
    }
    Some(a.intersection(b).count() as f64 / union as f64)
}

/// Leading numeral (roman or arabic) of a stage label: `IIIa` → `III`.
pub fn stage_numeral(label: &str) -> &str {
    let end = label
        .char_indices()
        .find(|(_, c)| !matches!(c, 'I' | 'V' | 'X' | '0'..='9'))
        .map(|(i, _)| i)
        .unwrap_or(label.len());
    &label[..end]
}

pub fn stage_similarity(a: &str, b: &str) -> f64 {
    let (a, b) = (a.trim(), b.trim());
    if a.eq_ignore_ascii_case(b) {
        return 1.0;
    }
    let (na, nb) = (stage_numeral(a), stage_numeral(b));
    if !na.is_empty() && na == nb {
        0.5
    } else {
        0.0
    }
}

pub fn age_similarity(a: u32, b: u32) -> f64 {
    (1.0 - f64::from(a.abs_diff(b)) / AGE_SCALE).clamp(0.0, 1.0)
}

fn diagnosis_similarity(
    a: Option<&str>,
    b: Option<&str>,
    o: &Ontology,
    opts: SimilarityOptions,
) -> Option<f64> {
    let (a, b) = (a?, b?);
    if !opts.use_ontology {
        return Some(if a == b { 1.0 } else { 0.0 });
    }
    match o.term_similarity(a, b) {
        Ok(s) => Some(s),
        Err(OntologyError::NoCommonAncestor { .. }) => Some(0.0),
        Err(_) => None,
    }
}

/// Precomputed view of a query case, reused across candidates.
pub struct Matcher<'a> {
    query: &'a ClinicalCase,
    query_keywords: BTreeSet<String>,
    ontology: &'a Ontology,
    opts: SimilarityOptions,
}

impl<'a> Matcher<'a> {
    pub fn new(query: &'a ClinicalCase, ontology: &'a Ontology, opts: SimilarityOptions) -> Self {
        Matcher {
            query,
            query_keywords: expanded_keywords(query, ontology, opts),
            ontology,
            opts,
        }
    }

    pub fn facets(&self, candidate: &ClinicalCase) -> FacetScores {
        let cand_keywords = expanded_keywords(candidate, self.ontology, self.opts);
        let q = &self.query.diagnosis;
        let c = &candidate.diagnosis;
        let values = [
            (
                Facet::Diagnosis,
                diagnosis_similarity(q.term_id.as_deref(), c.term_id.as_deref(), self.ontology, self.opts),
            ),
            (Facet::Keywords, jaccard(&self.query_keywords, &cand_keywords)),
            (
                Facet::Age,
                Some(age_similarity(self.query.environment.age, candidate.environment.age)),
            ),
            (
                Facet::Stage,
                q.stage.as_deref().zip(c.stage.as_deref()).map(|(a, b)| stage_similarity(a, b)),
            ),
        ];
        let mut out = FacetScores {
            scores: BTreeMap::new(),
            missing: BTreeSet::new(),
        };
        for (facet, value) in values {
            if value.is_none() {
                out.missing.insert(facet);
            }
            out.scores.insert(facet, value.unwrap_or(0.0));
        }
        out
    }

    pub fn rank(&self, candidate: &ClinicalCase, weights: &SimilarityWeights) -> RankedCase {
        let facets = self.facets(candidate);
        RankedCase {
            case_id: candidate.case_id.clone(),
            score: facets.weighted(weights),
            component_scores: facets.scores,
            missing: facets.missing,
        }
    }
}

pub fn facet_similarities(
    query: &ClinicalCase,
    candidate: &ClinicalCase,
    o: &Ontology,
    opts: SimilarityOptions,
) -> FacetScores {
    Matcher::new(query, o, opts).facets(candidate)
}

pub fn score(
    query: &ClinicalCase,
    candidate: &ClinicalCase,
    weights: &SimilarityWeights,
    o: &Ontology,
    opts: SimilarityOptions,
) -> f64 {
    facet_similarities(query, candidate, o, opts).weighted(weights)
}

/// Order by score descending, then case id ascending.
pub fn sort_ranked(ranked: &mut [RankedCase]) {
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.case_id.cmp(&b.case_id)));
}

/// The `k` best-scoring cases. Returns fewer when the base is smaller.
pub fn retrieve_top_k(
    cb: &CaseBase,
    query: &ClinicalCase,
    k: usize,
    weights: &SimilarityWeights,
    o: &Ontology,
    opts: SimilarityOptions,
) -> Vec<RankedCase> {
    let matcher = Matcher::new(query, o, opts);
    let mut ranked: Vec<RankedCase> = cb.cases().map(|c| matcher.rank(c, weights)).collect();
    sort_ranked(&mut ranked);
    ranked.truncate(k);
    ranked
}
