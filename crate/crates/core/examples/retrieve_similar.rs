//! Rank the fixture cases against a query, with and without the ontology.

use oncodss::casebase::{self, ClinicalCase, PatientRecord, Sex};
use oncodss::ontology::Ontology;
use oncodss::similarity::{facet_similarities, retrieve_top_k, SimilarityOptions, SimilarityWeights};

fn main() -> anyhow::Result<()> {
    let dir = oncodss::fixtures_dir();
    let o = Ontology::load(dir.join("mini-do.obo"))?;
    let cb = casebase::load_checked(dir.join("gastric-cases.jsonl"), &o)?;

    let mut q = ClinicalCase::new("query", PatientRecord::new(40, Sex::Male));
    q.diagnosis.term_id = Some("DOID:10534".into());
    q.diagnosis.stage = Some("IIIa".into());
    q.problem.keywords = ["stomach cancer", "pyloric obstruction", "palpable mass"]
        .map(String::from)
        .into();

    let w = SimilarityWeights::default();
    for use_ontology in [true, false] {
        println!("use_ontology = {use_ontology}");
        for r in retrieve_top_k(&cb, &q, 5, &w, &o, SimilarityOptions { use_ontology }) {
            let f = facet_similarities(&q, cb.get(&r.case_id).unwrap(), &o, SimilarityOptions { use_ontology });
            println!("  {:<8} {:.4}  {:?}", r.case_id, r.score, f);
        }
    }
    Ok(())
}
