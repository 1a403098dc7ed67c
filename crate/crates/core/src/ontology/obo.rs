//! Reader for OBO 1.2 flat files.
//!
//! Only `[Term]` stanzas are interpreted. Within a term the reader keeps
//! `id`, `name`, `synonym`, `is_a`, `is_obsolete`, `relationship` and
//! `property_value`; every other tag is ignored. Header lines and other
//! stanza kinds (`[Typedef]`, `[Instance]`) are skipped.

use std::collections::BTreeSet;

use super::{Ontology, OntologyError, Term, Triple};

#[derive(Debug, Default)]
struct Stanza {
    line: usize,
    id: Option<String>,
    name: Option<String>,
    synonyms: BTreeSet<String>,
    parents: BTreeSet<String>,
    obsolete: bool,
    relations: Vec<(String, String)>,
}

/// Parse an OBO document into a validated [`Ontology`].
pub fn parse_obo(text: &str) -> Result<Ontology, OntologyError> {
    let mut stanzas = Vec::new();
    let mut current: Option<Stanza> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('!') {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            stanzas.extend(current.take());
            if line == "[Term]" {
                current = Some(Stanza {
                    line: line_no,
                    ..Stanza::default()
                });
            }
            continue;
        }
        let Some(stanza) = current.as_mut() else {
            continue;
        };
        let Some((tag, value)) = line.split_once(':') else {
            return Err(OntologyError::Malformed {
                line: line_no,
                message: format!("expected `tag: value`, found {line:?}"),
            });
        };
        let value = value.trim();
        match tag.trim() {
            "id" => stanza.id = Some(strip_comment(value).to_string()).filter(|s| !s.is_empty()),
            "name" => stanza.name = Some(value.to_string()),
            "synonym" => {
                let syn = quoted(value).ok_or_else(|| OntologyError::Malformed {
                    line: line_no,
                    message: "synonym without a quoted label".into(),
                })?;
                stanza.synonyms.insert(syn);
            }
            "is_a" => {
                let parent = first_word(strip_comment(value));
                if parent.is_empty() {
                    return Err(OntologyError::Malformed {
                        line: line_no,
                        message: "is_a without a target".into(),
                    });
                }
                stanza.parents.insert(parent.to_string());
            }
            "is_obsolete" => stanza.obsolete = value.eq_ignore_ascii_case("true"),
            "relationship" => {
                let mut parts = strip_comment(value).split_whitespace();
                match (parts.next(), parts.next()) {
                    (Some(rel), Some(target)) => {
                        stanza.relations.push((rel.to_string(), target.to_string()))
                    }
                    _ => {
                        return Err(OntologyError::Malformed {
                            line: line_no,
                            message: "relationship needs `<relation> <target>`".into(),
                        })
                    }
                }
            }
            "property_value" => {
                let (rel, rest) = value.split_once(char::is_whitespace).ok_or_else(|| {
                    OntologyError::Malformed {
                        line: line_no,
                        message: "property_value needs `<relation> <value>`".into(),
                    }
                })?;
                let rest = rest.trim();
                let object = match quoted(rest) {
                    Some(literal) => literal,
                    None => first_word(strip_comment(rest)).to_string(),
                };
                stanza.relations.push((rel.to_string(), object));
            }
            _ => {}
        }
    }
    stanzas.extend(current.take());

    let mut terms = Vec::with_capacity(stanzas.len());
    let mut triples = Vec::new();
    for stanza in stanzas {
        let id = stanza.id.ok_or(OntologyError::MissingId { line: stanza.line })?;
        if !stanza.obsolete {
            for (relation, object) in stanza.relations {
                triples.push(Triple::new(id.clone(), relation, object)?);
            }
        }
        terms.push(Term {
            name: stanza.name.unwrap_or_else(|| id.clone()),
            id,
            synonyms: stanza.synonyms,
            parents: stanza.parents,
            obsolete: stanza.obsolete,
        });
    }
    Ontology::from_parts(terms, triples)
}

fn strip_comment(value: &str) -> &str {
    match value.find(" !") {
        Some(i) => value[..i].trim(),
        None => value.trim(),
    }
}

fn first_word(value: &str) -> &str {
    value.split_whitespace().next().unwrap_or("")
}

/// Extract the first double-quoted string, honouring backslash escapes.
fn quoted(value: &str) -> Option<String> {
    let rest = value.strip_prefix('"')?;
    let mut out = String::new();
    let mut chars = rest.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => out.push(chars.next()?),
            '"' => return Some(out),
            other => out.push(other),
        }
    }
    None
}
