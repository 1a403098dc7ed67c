//! Query interpretation: free text → normalized keywords and ontology terms.
//!
//! Text is split into tokens and punctuation-delimited segments. A greedy,
//! left-to-right scan takes the longest run of tokens (never crossing a
//! segment boundary) that is either a lexicon phrase or an ontology label.
//! Matched phrases become keywords; those that resolve in the ontology are
//! also reported as matched terms and contribute the term's canonical name.
//! Leftover tokens that are not stopwords are kept as single-word keywords.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::casebase::{ClinicalCase, Diagnosis, PatientRecord, Problem};
use crate::ontology::Ontology;
use crate::text::{normalize_keyword, parse_word_list};

/// Case id given to synthesized query cases.
pub const QUERY_CASE_ID: &str = "query";

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    phrases: BTreeSet<String>,
    max_words: usize,
}

impl Lexicon {
    pub fn from_text(text: &str) -> Self {
        let mut lex = Lexicon::default();
        lex.extend(parse_word_list(text));
        lex
    }

    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Self> {
        Ok(Self::from_text(&std::fs::read_to_string(path)?))
    }

    pub fn extend<I, S>(&mut self, phrases: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for p in phrases {
            let p = normalize_keyword(p.as_ref());
            if p.is_empty() {
                continue;
            }
            self.max_words = self.max_words.max(p.split(' ').count());
            self.phrases.insert(p);
        }
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.phrases.contains(phrase)
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Stopwords(BTreeSet<String>);

impl Stopwords {
    pub fn from_text(text: &str) -> Self {
        Stopwords(parse_word_list(text).into_iter().collect())
    }

    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Self> {
        Ok(Self::from_text(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedTerm {
    /// The matched span exactly as it appears in the raw text.
    pub surface: String,
    pub term_id: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryBundle {
    pub raw_text: String,
    pub matched_terms: Vec<MatchedTerm>,
    pub keywords: BTreeSet<String>,
    pub unmatched_tokens: Vec<String>,
}

#[derive(Debug)]
struct Token {
    lower: String,
    start: usize,
    end: usize,
    segment: usize,
}

fn is_boundary(c: char) -> bool {
    matches!(c, ',' | ';' | ':' | '.' | '!' | '?' | '(' | ')' | '[' | ']' | '{' | '}' | '/' | '\n')
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut segment = 0;
    let mut start: Option<usize> = None;
    let flush = |start: &mut Option<usize>, end: usize, segment: usize, tokens: &mut Vec<Token>| {
        if let Some(s) = start.take() {
            let raw = &text[s..end];
            let trimmed = raw.trim_matches('-');
            if !trimmed.is_empty() {
                let lead = raw.len() - raw.trim_start_matches('-').len();
                tokens.push(Token {
                    lower: trimmed.to_lowercase(),
                    start: s + lead,
                    end: s + lead + trimmed.len(),
                    segment,
                });
            }
        }
    };
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() || c == '-' {
            start.get_or_insert(i);
            continue;
        }
        flush(&mut start, i, segment, &mut tokens);
        if is_boundary(c) {
            segment += 1;
        }
    }
    flush(&mut start, text.len(), segment, &mut tokens);
    tokens
}

/// Interpret `text` against the ontology labels, the phrase lexicon and the
/// stopword list.
pub fn extract(text: &str, o: &Ontology, vocab: &Lexicon, stopwords: &Stopwords) -> QueryBundle {
    let tokens = tokenize(text);
    let max_words = vocab.max_words.max(o.max_label_words()).max(1);
    let mut bundle = QueryBundle {
        raw_text: text.to_string(),
        ..QueryBundle::default()
    };

    let mut i = 0;
    while i < tokens.len() {
        let seg_end = tokens[i..]
            .iter()
            .position(|t| t.segment != tokens[i].segment)
            .map_or(tokens.len(), |p| i + p);
        let longest = max_words.min(seg_end - i);

        let hit = (1..=longest).rev().find_map(|len| {
            let phrase = tokens[i..i + len]
                .iter()
                .map(|t| t.lower.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let resolved = o.resolve(&phrase);
            (resolved.is_some() || vocab.contains(&phrase)).then_some((len, phrase, resolved))
        });

        match hit {
            Some((len, phrase, resolved)) => {
                if let Some(res) = resolved {
                    if let Some(term) = o.term(&res.id) {
                        bundle.keywords.insert(normalize_keyword(&term.name));
                    }
                    bundle.matched_terms.push(MatchedTerm {
                        surface: text[tokens[i].start..tokens[i + len - 1].end].to_string(),
                        term_id: res.id,
                    });
                }
                bundle.keywords.insert(phrase);
                i += len;
            }
            None => {
                let word = &tokens[i].lower;
                if !stopwords.contains(word) {
                    bundle.keywords.insert(word.clone());
                    bundle.unmatched_tokens.push(word.clone());
                }
                i += 1;
            }
        }
    }
    bundle
}

/// Synthesize an unsaved query case from an interpreted query.
///
/// The diagnosis term is the deepest matched disease term, ties going to the
/// smallest id.
pub fn build_query_case(
    bundle: &QueryBundle,
    record: PatientRecord,
    stage: Option<&str>,
    o: &Ontology,
) -> ClinicalCase {
    let term_id = bundle
        .matched_terms
        .iter()
        .map(|m| m.term_id.as_str())
        .filter(|id| o.is_disease(id))
        .filter_map(|id| o.depth(id).ok().map(|d| (d, id)))
        .max_by(|(da, ia), (db, ib)| da.cmp(db).then_with(|| ib.cmp(ia)))
        .map(|(_, id)| id.to_string());

    let mut case = ClinicalCase::new(QUERY_CASE_ID, record);
    case.problem = Problem {
        keywords: bundle.keywords.clone(),
        summary: bundle.raw_text.clone(),
    };
    case.diagnosis = Diagnosis {
        term_id,
        code: None,
        stage: stage.map(|s| s.trim().to_string()).filter(|s| !s.is_empty()),
    };
    case.normalize();
    case
}
