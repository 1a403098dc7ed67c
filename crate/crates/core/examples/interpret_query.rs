//! Turn free text into keywords, ontology matches and a query case.

use oncodss::casebase::{PatientRecord, Sex};
use oncodss::interpreter::{build_query_case, extract};
use oncodss::service::Knowledge;

fn main() -> anyhow::Result<()> {
    let k = Knowledge::bundled()?;
    let o = k.ontology.as_deref().expect("bundled ontology");
    let text = std::env::args().nth(1).unwrap_or_else(|| {
        "Stomach cancer with pyloric obstruction; acid reflux, belching and vomiting".into()
    });
    let bundle = extract(&text, o, &k.lexicon, &k.stopwords);
    for m in &bundle.matched_terms {
        println!("matched {:?} -> {}", m.surface, m.term_id);
    }
    println!("keywords: {:?}", bundle.keywords);
    println!("unmatched: {:?}", bundle.unmatched_tokens);
    let q = build_query_case(&bundle, PatientRecord::new(40, Sex::Male), Some("IIIa"), o);
    println!("query diagnosis term: {:?}", q.diagnosis.term_id);
    Ok(())
}
