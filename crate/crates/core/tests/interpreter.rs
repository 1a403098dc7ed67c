mod common;

use std::collections::BTreeSet;

use oncodss::casebase::{PatientRecord, Sex};
use oncodss::interpreter::{build_query_case, extract, Lexicon, QueryBundle, Stopwords, QUERY_CASE_ID};
use oncodss::ontology::Ontology;
use oncodss::text::normalize_keyword;
use proptest::prelude::*;

fn run(text: &str) -> QueryBundle {
    let k = common::knowledge();
    extract(text, k.ontology.as_deref().unwrap(), &k.lexicon, &k.stopwords)
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn check_invariants(b: &QueryBundle, o: &Ontology) {
    let lower = b.raw_text.to_lowercase();
    for m in &b.matched_terms {
        let t = o.term(&m.term_id).expect("matched id resolves");
        assert!(b.keywords.contains(&normalize_keyword(&t.name)), "{}", t.name);
        assert!(lower.contains(&m.surface.to_lowercase()), "{}", m.surface);
    }
}

#[test]
fn syndrome_list_becomes_three_keywords() {
    let b = run("acid reflux, belching, vomiting");
    assert_eq!(b.keywords, set(&["acid reflux", "belching", "vomiting"]));
    assert_eq!(b.matched_terms.len(), 3);
    assert!(b.unmatched_tokens.is_empty());
}

#[test]
fn synonym_resolves_to_canonical_term() {
    let b = run("stomach cancer with pyloric obstruction");
    let first = &b.matched_terms[0];
    assert_eq!((first.surface.as_str(), first.term_id.as_str()), ("stomach cancer", "DOID:10534"));
    assert!(b.keywords.contains("gastric cancer"));
    assert!(b.keywords.contains("stomach cancer"));
    assert!(b.keywords.contains("pyloric obstruction"));
    assert!(!b.keywords.contains("with"));
    check_invariants(&b, common::knowledge().ontology.as_deref().unwrap());
}

#[test]
fn empty_text_gives_empty_bundle() {
    let b = run("");
    assert_eq!(b, QueryBundle::default());
    let b = run("  ,;  the and of ");
    assert!(b.keywords.is_empty() && b.matched_terms.is_empty() && b.unmatched_tokens.is_empty());
}

#[test]
fn longest_phrase_wins_and_keeps_original_casing() {
    let b = run("Antral Wall Thickening noted");
    assert!(b.keywords.contains("antral wall thickening"));
    assert!(!b.keywords.contains("antral wall"));
    assert_eq!(b.unmatched_tokens, vec!["noted"]);
    let b = run("STOMACH ADENOCARCINOMA");
    assert_eq!(b.matched_terms[0].surface, "STOMACH ADENOCARCINOMA");
    assert_eq!(b.matched_terms[0].term_id, "DOID:3717");
}

#[test]
fn phrases_never_cross_punctuation() {
    let b = run("antral wall, thickening");
    assert!(b.keywords.contains("antral wall"));
    assert!(b.keywords.contains("thickening"));
    assert!(!b.keywords.contains("antral wall thickening"));
}

#[test]
fn custom_lexicon_and_stopwords_apply() {
    let o = common::ontology();
    let lex = Lexicon::from_text("# comment\nBlue Sky\n");
    let stop = Stopwords::from_text("under\n");
    let b = extract("blue sky under clouds", &o, &lex, &stop);
    assert_eq!(b.keywords, set(&["blue sky", "clouds"]));
    assert_eq!(b.unmatched_tokens, vec!["clouds"]);
    assert!(b.matched_terms.is_empty());
}

#[test]
fn stage_iiia_text_builds_gastric_query_case() {
    let k = common::knowledge();
    let o = k.ontology.as_deref().unwrap();
    let b = extract(common::STAGE_IIIA_TEXT, o, &k.lexicon, &k.stopwords);
    check_invariants(&b, o);
    let q = build_query_case(&b, PatientRecord::new(40, Sex::Male), Some(" IIIa "), o);
    assert_eq!(q.case_id, QUERY_CASE_ID);
    assert_eq!(q.diagnosis.term_id.as_deref(), Some("DOID:10534"));
    assert_eq!(q.diagnosis.stage.as_deref(), Some("IIIa"));
    assert_eq!(q.problem.keywords, b.keywords);
    assert!(q.treatment_rounds.is_empty() && q.support_rounds.is_empty());
    assert_eq!(q.result.survival_months, None);
    for kw in ["pyloric obstruction", "palpable mass", "high-differentiated adenocarcinoma"] {
        assert!(q.problem.keywords.contains(kw), "{kw}");
    }
}

#[test]
fn deepest_disease_term_is_chosen() {
    let k = common::knowledge();
    let o = k.ontology.as_deref().unwrap();
    // cancer (depth 2) and gastric adenocarcinoma (depth 5); vomiting is a symptom
    let b = extract("vomiting, cancer, gastric adenocarcinoma", o, &k.lexicon, &k.stopwords);
    let q = build_query_case(&b, PatientRecord::new(60, Sex::Female), None, o);
    assert_eq!(q.diagnosis.term_id.as_deref(), Some("DOID:3717"));
    assert_eq!(q.diagnosis.stage, None);
    // equal depth: the smaller id wins
    let b = extract("colorectal cancer, gastric cancer", o, &k.lexicon, &k.stopwords);
    assert_eq!(o.depth("DOID:9256").unwrap(), o.depth("DOID:10534").unwrap());
    let q = build_query_case(&b, PatientRecord::new(60, Sex::Female), None, o);
    assert_eq!(q.diagnosis.term_id.as_deref(), Some("DOID:10534"));
    // symptoms alone give no diagnosis term
    let b = extract("vomiting and belching", o, &k.lexicon, &k.stopwords);
    let q = build_query_case(&b, PatientRecord::new(60, Sex::Female), None, o);
    assert_eq!(q.diagnosis.term_id, None);
}

const PIECES: &[&str] = &[
    "gastric cancer", "Stomach Cancer", "pyloric obstruction", "antral wall", "thickening",
    "emesis", "the", "with", "and", "palpable mass", "mass", "5-FU", "lung carcinoma",
    "cancer", "weight loss", "fatigue", "radical resection", "x-ray", "Ménétrier",
];
const SEPS: &[&str] = &[" ", ", ", ". ", "; ", " (", ") ", "\n", " / "];

fn arb_text() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        (proptest::sample::select(PIECES), proptest::sample::select(SEPS)),
        0..12,
    )
    .prop_map(|parts| parts.into_iter().map(|(p, s)| format!("{p}{s}")).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bundles_satisfy_invariants(text in arb_text()) {
        let k = common::knowledge();
        let o = k.ontology.as_deref().unwrap();
        let b = extract(&text, o, &k.lexicon, &k.stopwords);
        check_invariants(&b, o);
        prop_assert_eq!(&b, &extract(&text, o, &k.lexicon, &k.stopwords));
        for t in &b.unmatched_tokens {
            prop_assert!(b.keywords.contains(t));
            prop_assert!(!k.stopwords.contains(t));
        }
        for kw in &b.keywords {
            prop_assert_eq!(kw, &normalize_keyword(kw));
        }
    }

    #[test]
    fn reextracting_keywords_is_idempotent(text in arb_text()) {
        let k = common::knowledge();
        let o = k.ontology.as_deref().unwrap();
        let b = extract(&text, o, &k.lexicon, &k.stopwords);
        let joined = b.keywords.iter().cloned().collect::<Vec<_>>().join(", ");
        let again = extract(&joined, o, &k.lexicon, &k.stopwords);
        prop_assert_eq!(again.keywords, b.keywords);
    }
}
