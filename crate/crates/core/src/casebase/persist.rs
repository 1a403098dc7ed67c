//! JSONL case store: one `ClinicalCase` object per line.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{CaseBase, CaseBaseError, ClinicalCase};
use crate::ontology::Ontology;

/// Write every case, in id order, replacing the file atomically.
pub fn save(cb: &CaseBase, path: impl AsRef<Path>) -> Result<(), CaseBaseError> {
    let path = path.as_ref();
    let io = |e: std::io::Error| CaseBaseError::IoFailure(format!("{}: {e}", path.display()));

    let mut buf = Vec::new();
    for case in cb.cases() {
        serde_json::to_writer(&mut buf, case)
            .map_err(|e| CaseBaseError::IoFailure(e.to_string()))?;
        buf.push(b'\n');
    }
    let tmp = path.with_extension("jsonl.tmp");
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(&buf).map_err(io)?;
    file.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

pub fn load(path: impl AsRef<Path>) -> Result<CaseBase, CaseBaseError> {
    load_inner(path.as_ref(), None)
}

/// Load and additionally require every diagnosis term to exist in `ontology`.
pub fn load_checked(path: impl AsRef<Path>, ontology: &Ontology) -> Result<CaseBase, CaseBaseError> {
    load_inner(path.as_ref(), Some(ontology))
}

fn load_inner(path: &Path, ontology: Option<&Ontology>) -> Result<CaseBase, CaseBaseError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CaseBaseError::IoFailure(format!("{}: {e}", path.display())))?;
    let mut cb = CaseBase::new();
    for (line, case) in parse_jsonl(&text)? {
        cb.add_case(case, ontology)
            .map_err(|e| CaseBaseError::MalformedRecord {
                line,
                message: e.to_string(),
            })?;
    }
    Ok(cb)
}

/// Parse JSONL into `(line number, case)` pairs. Blank lines are skipped.
pub fn parse_jsonl(text: &str) -> Result<Vec<(usize, ClinicalCase)>, CaseBaseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map(|c| (i + 1, c))
                .map_err(|e| CaseBaseError::MalformedRecord {
                    line: i + 1,
                    message: e.to_string(),
                })
        })
        .collect()
}
