//! Build a case base, query its keyword index and persist it as JSONL.

use oncodss::casebase::{self, CaseBase, ClinicalCase, PatientRecord, Sex};

fn main() -> anyhow::Result<()> {
    let fixture = casebase::load(oncodss::fixtures_dir().join("gastric-cases.jsonl"))?;
    println!("fixture: {} cases, revision {}", fixture.len(), fixture.revision());
    println!("'pyloric obstruction' -> {:?}", fixture.lookup_by_keyword("Pyloric Obstruction"));

    let mut cb = CaseBase::new();
    let mut c = ClinicalCase::new("DEMO-1", PatientRecord::new(58, Sex::Female).with_findings(["Melena"]));
    c.diagnosis.term_id = Some("DOID:3717".into());
    c.diagnosis.stage = Some("II".into());
    c.problem.keywords.insert("Weight Loss".into());
    cb.add_case(c.clone(), None)?;
    if let Err(e) = cb.add_case(c, None) {
        println!("second insert rejected: {e}");
    }

    let dir = tempfile_dir()?;
    let path = dir.join("demo.jsonl");
    casebase::save(&cb, &path)?;
    let back = casebase::load(&path)?;
    println!("round trip identical: {}", back.same_cases(&cb));
    std::fs::remove_dir_all(dir)?;
    Ok(())
}

fn tempfile_dir() -> std::io::Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join(format!("oncodss-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}
