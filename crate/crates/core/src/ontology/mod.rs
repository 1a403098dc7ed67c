//! Disease ontology: an `is_a` DAG of terms plus free-form knowledge triples.
//!
//! Only `is_a` edges take part in depth, ancestry and similarity. Every other
//! relationship is kept as a [`Triple`]. Obsolete terms are retained for
//! lookup but are not part of the graph, so they never resolve and never take
//! part in similarity.
//!
//! Depth is 1-based: roots have depth 1 and every other term sits one level
//! below its deepest parent, which keeps Wu–Palmer similarity within [0, 1]
//! on any DAG.

mod obo;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::normalize_keyword;

pub use obo::parse_obo;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OntologyError {
    #[error("[Term] stanza starting at line {line} has no id")]
    MissingId { line: usize },
    #[error("malformed OBO at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate term id {0}")]
    DuplicateId(String),
    #[error("is_a cycle through {term}")]
    CycleDetected { term: String },
    #[error("term {term} has is_a parent {parent} which is not defined")]
    DanglingParent { term: String, parent: String },
    #[error("unknown term {0}")]
    UnknownTerm(String),
    #[error("terms {a} and {b} share no common ancestor")]
    NoCommonAncestor { a: String, b: String },
    #[error("triple components must be non-empty")]
    EmptyTriple,
    #[error("cannot read ontology: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub id: String,
    pub name: String,
    pub synonyms: BTreeSet<String>,
    /// `is_a` parents.
    pub parents: BTreeSet<String>,
    pub obsolete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl Triple {
    pub fn new(
        subject: impl Into<String>,
        relation: impl Into<String>,
        object: impl Into<String>,
    ) -> Result<Self, OntologyError> {
        let triple = Triple {
            subject: subject.into(),
            relation: relation.into(),
            object: object.into(),
        };
        if triple.subject.is_empty() || triple.relation.is_empty() || triple.object.is_empty() {
            return Err(OntologyError::EmptyTriple);
        }
        Ok(triple)
    }
}

/// Outcome of a label lookup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub id: String,
    /// More than one term carried the label at the winning tier.
    pub ambiguous: bool,
}

#[derive(Debug, Default, Clone)]
struct LabelEntry {
    by_name: BTreeSet<String>,
    by_synonym: BTreeSet<String>,
}

#[derive(Debug, Clone)]
pub struct Ontology {
    terms: BTreeMap<String, Term>,
    obsolete: BTreeMap<String, Term>,
    triples: Vec<Triple>,
    roots: BTreeSet<String>,
    depth: HashMap<String, u32>,
    labels: HashMap<String, LabelEntry>,
    max_label_words: usize,
}

impl Ontology {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, OntologyError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| OntologyError::Io(format!("{}: {e}", path.display())))?;
        parse_obo(&text)
    }

    /// Build and validate an ontology from already-parsed terms.
    pub fn from_parts(terms: Vec<Term>, triples: Vec<Triple>) -> Result<Self, OntologyError> {
        let mut live = BTreeMap::new();
        let mut obsolete = BTreeMap::new();
        for mut term in terms {
            if term.id.is_empty() {
                return Err(OntologyError::MissingId { line: 0 });
            }
            if live.contains_key(&term.id) || obsolete.contains_key(&term.id) {
                return Err(OntologyError::DuplicateId(term.id));
            }
            let name_key = normalize_keyword(&term.name);
            term.synonyms.retain(|s| normalize_keyword(s) != name_key);
            if term.obsolete {
                obsolete.insert(term.id.clone(), term);
            } else {
                live.insert(term.id.clone(), term);
            }
        }

        for term in live.values() {
            if let Some(parent) = term.parents.iter().find(|p| !live.contains_key(*p)) {
                return Err(OntologyError::DanglingParent {
                    term: term.id.clone(),
                    parent: parent.clone(),
                });
            }
        }

        let depth = compute_depths(&live)?;
        let roots = live
            .values()
            .filter(|t| t.parents.is_empty())
            .map(|t| t.id.clone())
            .collect();

        let mut labels: HashMap<String, LabelEntry> = HashMap::new();
        let mut max_label_words = 0;
        for term in live.values() {
            let key = normalize_keyword(&term.name);
            max_label_words = max_label_words.max(key.split(' ').count());
            labels.entry(key).or_default().by_name.insert(term.id.clone());
            for syn in &term.synonyms {
                let key = normalize_keyword(syn);
                max_label_words = max_label_words.max(key.split(' ').count());
                labels.entry(key).or_default().by_synonym.insert(term.id.clone());
            }
        }

        Ok(Ontology {
            terms: live,
            obsolete,
            triples,
            roots,
            depth,
            labels,
            max_label_words,
        })
    }

    /// Number of live (non-obsolete) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, id: &str) -> Option<&Term> {
        self.terms.get(id)
    }

    /// Live term, or an obsolete one kept for reference.
    pub fn any_term(&self, id: &str) -> Option<&Term> {
        self.terms.get(id).or_else(|| self.obsolete.get(id))
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.values()
    }

    pub fn roots(&self) -> &BTreeSet<String> {
        &self.roots
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn depth(&self, id: &str) -> Result<u32, OntologyError> {
        self.depth
            .get(id)
            .copied()
            .ok_or_else(|| OntologyError::UnknownTerm(id.to_string()))
    }

    /// Longest label (name or synonym) measured in words.
    pub fn max_label_words(&self) -> usize {
        self.max_label_words
    }

    /// Reflexive transitive `is_a` closure ordered by (depth, id).
    pub fn ancestors(&self, id: &str) -> Result<Vec<&str>, OntologyError> {
        let start = self.live(id)?;
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut stack = vec![start.id.as_str()];
        while let Some(cur) = stack.pop() {
            if seen.insert(cur) {
                stack.extend(self.terms[cur].parents.iter().map(String::as_str));
            }
        }
        let mut out: Vec<&str> = seen.into_iter().collect();
        out.sort_by_key(|t| (self.depth[*t], *t));
        Ok(out)
    }

    /// The term plus every ancestor reachable in at most `hops` `is_a` steps.
    pub fn ancestors_within(&self, id: &str, hops: u32) -> Result<Vec<&str>, OntologyError> {
        let start = self.live(id)?;
        let mut seen: BTreeSet<&str> = BTreeSet::from([start.id.as_str()]);
        let mut queue = VecDeque::from([(start.id.as_str(), 0u32)]);
        while let Some((cur, dist)) = queue.pop_front() {
            if dist == hops {
                continue;
            }
            for parent in &self.terms[cur].parents {
                if seen.insert(parent.as_str()) {
                    queue.push_back((parent.as_str(), dist + 1));
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// Deepest shared ancestor; ties go to the lexicographically smallest id.
    pub fn lowest_common_ancestor(&self, a: &str, b: &str) -> Result<&str, OntologyError> {
        let left: BTreeSet<&str> = self.ancestors(a)?.into_iter().collect();
        let right = self.ancestors(b)?;
        right
            .into_iter()
            .filter(|t| left.contains(t))
            .max_by(|x, y| self.depth[*x].cmp(&self.depth[*y]).then_with(|| y.cmp(x)))
            .ok_or_else(|| OntologyError::NoCommonAncestor {
                a: a.to_string(),
                b: b.to_string(),
            })
    }

    /// Wu–Palmer similarity over `is_a` depth.
    pub fn term_similarity(&self, a: &str, b: &str) -> Result<f64, OntologyError> {
        let lca = self.lowest_common_ancestor(a, b)?;
        let shared = f64::from(self.depth[lca]);
        Ok(2.0 * shared / f64::from(self.depth[a] + self.depth[b]))
    }

    /// Case-insensitive label lookup: names first, then synonyms.
    pub fn resolve(&self, label: &str) -> Option<Resolution> {
        let entry = self.labels.get(&normalize_keyword(label))?;
        let tier = if entry.by_name.is_empty() {
            &entry.by_synonym
        } else {
            &entry.by_name
        };
        let id = tier.iter().next()?.clone();
        Some(Resolution {
            id,
            ambiguous: tier.len() > 1,
        })
    }

    /// Triples whose subject or object is `key`, or the term `key` resolves
    /// to, in load order.
    pub fn triples_about(&self, key: &str) -> Vec<&Triple> {
        let resolved = self.resolve(key).map(|r| r.id);
        let hit = |s: &str| s == key || resolved.as_deref() == Some(s);
        self.triples
            .iter()
            .filter(|t| hit(&t.subject) || hit(&t.object))
            .collect()
    }

    /// Whether `id` descends from (or is) a root named `disease`.
    pub fn is_disease(&self, id: &str) -> bool {
        self.ancestors(id)
            .map(|anc| {
                anc.iter()
                    .any(|a| self.roots.contains(*a) && self.terms[*a].name.eq_ignore_ascii_case("disease"))
            })
            .unwrap_or(false)
    }

    fn live(&self, id: &str) -> Result<&Term, OntologyError> {
        self.terms
            .get(id)
            .ok_or_else(|| OntologyError::UnknownTerm(id.to_string()))
    }
}

/// Topological pass from the roots down. Leaves any cycle unprocessed, which
/// is then reported with a term that lies on it.
/// Depth of every term: roots are 1, any other term is one below its
/// deepest parent, so a term is always deeper than each of its ancestors.
/// On a tree this equals one below the shallowest parent.
fn compute_depths(terms: &BTreeMap<String, Term>) -> Result<HashMap<String, u32>, OntologyError> {
    let mut depth: HashMap<String, u32> = HashMap::with_capacity(terms.len());
    for id in topological_order(terms)? {
        let d = terms[id]
            .parents
            .iter()
            .map(|p| depth[p.as_str()] + 1)
            .max()
            .unwrap_or(1);
        depth.insert(id.to_string(), d);
    }
    Ok(depth)
}

/// Kahn's algorithm over `is_a`; parents come before children.
fn topological_order(terms: &BTreeMap<String, Term>) -> Result<Vec<&str>, OntologyError> {
    let mut children: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut pending: HashMap<&str, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut order = Vec::with_capacity(terms.len());

    for term in terms.values() {
        pending.insert(&term.id, term.parents.len());
        for parent in &term.parents {
            children.entry(parent.as_str()).or_default().push(&term.id);
        }
        if term.parents.is_empty() {
            queue.push_back(term.id.as_str());
        }
    }

    while let Some(cur) = queue.pop_front() {
        order.push(cur);
        for &child in children.get(cur).map(Vec::as_slice).unwrap_or(&[]) {
            let left = pending.get_mut(child).expect("child registered");
            *left -= 1;
            if *left == 0 {
                queue.push_back(child);
            }
        }
    }

    if let Some((&stuck, _)) = pending.iter().filter(|(_, n)| **n > 0).min_by_key(|(id, _)| **id) {
        // Every unprocessed term has an unprocessed parent; walking those
        // parents must revisit a node, and that node is on a cycle.
        let mut visited = BTreeSet::new();
        let mut cur = stuck;
        while visited.insert(cur) {
            cur = terms[cur]
                .parents
                .iter()
                .map(String::as_str)
                .find(|p| pending[p] > 0)
                .expect("unprocessed term has an unprocessed parent");
        }
        return Err(OntologyError::CycleDetected {
            term: cur.to_string(),
        });
    }
    Ok(order)
}
