//! Fixture loaders and independent oracles shared by the integration tests.
//!
//! Oracles recompute results from first principles (term parents, raw case
//! fields) and never call the library routine they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use oncodss::casebase::{self, CaseBase, ClinicalCase};
use oncodss::eval::{self, Label, LabeledCase};
use oncodss::ontology::Ontology;
use oncodss::reasoning::RuleBook;
use oncodss::service::Knowledge;
use oncodss::similarity::RankedCase;

pub fn ontology() -> Ontology {
    Ontology::load(oncodss::fixtures_dir().join("mini-do.obo")).expect("fixture ontology")
}

pub fn cases() -> CaseBase {
    casebase::load_checked(oncodss::fixtures_dir().join("gastric-cases.jsonl"), &ontology())
        .expect("fixture cases")
}

pub fn rules() -> RuleBook {
    RuleBook::load_dir(oncodss::fixtures_dir()).expect("fixture rules")
}

pub fn knowledge() -> Knowledge {
    Knowledge::bundled().expect("bundled knowledge")
}

pub fn synthetic() -> (Ontology, Vec<LabeledCase>) {
    let dir = oncodss::fixtures_dir().join("synthetic");
    let o = Ontology::load(dir.join("ontology.obo")).expect("synthetic ontology");
    let data = eval::load_labeled(dir.join("labeled.jsonl")).expect("synthetic cases");
    (o, data)
}

pub const STAGE_IIIA_TEXT: &str = "40-year-old man with gastric cancer at the postoperative stage. \
    High-differentiated adenocarcinoma, pyloric obstruction, palpable mass, \
    abnormal thickening of antral wall and mucosa";
pub const STAGE_IIIA_PRECEDENT: &str = "GC-017";

/// `is_a` ancestors of `id` including itself, by walking parent links.
pub fn oracle_ancestors(o: &Ontology, id: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![id.to_string()];
    while let Some(cur) = stack.pop() {
        if let Some(t) = o.term(&cur) {
            if seen.insert(cur.clone()) {
                stack.extend(t.parents.iter().cloned());
            }
        }
    }
    seen
}

/// Depth as the number of terms on the longest `is_a` path up to a root.
pub fn oracle_depth(o: &Ontology, id: &str) -> u32 {
    let t = o.term(id).expect("live term");
    1 + t.parents.iter().map(|p| oracle_depth(o, p)).max().unwrap_or(0)
}

/// Deepest common ancestor by scanning every term; ties to the smallest id.
pub fn oracle_lca(o: &Ontology, a: &str, b: &str) -> Option<String> {
    let (left, right) = (oracle_ancestors(o, a), oracle_ancestors(o, b));
    let mut best: Option<(u32, String)> = None;
    for t in o.terms() {
        if !(left.contains(&t.id) && right.contains(&t.id)) {
            continue;
        }
        let d = oracle_depth(o, &t.id);
        let better = match &best {
            None => true,
            Some((bd, bid)) => d > *bd || (d == *bd && t.id < *bid),
        };
        if better {
            best = Some((d, t.id.clone()));
        }
    }
    best.map(|(_, id)| id)
}

pub fn oracle_wu_palmer(o: &Ontology, a: &str, b: &str) -> Option<f64> {
    let lca = oracle_lca(o, a, b)?;
    Some(
        2.0 * f64::from(oracle_depth(o, &lca))
            / f64::from(oracle_depth(o, a) + oracle_depth(o, b)),
    )
}

fn norm(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Label → term id: exact names first, then synonyms, smallest id wins.
fn oracle_resolve(o: &Ontology, label: &str) -> Option<String> {
    let key = norm(label);
    let by_name = o.terms().filter(|t| norm(&t.name) == key).map(|t| t.id.clone()).min();
    by_name.or_else(|| {
        o.terms()
            .filter(|t| t.synonyms.iter().any(|s| norm(s) == key))
            .map(|t| t.id.clone())
            .min()
    })
}

fn oracle_within_two(o: &Ontology, id: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::from([id.to_string()]);
    let t = o.term(id).unwrap();
    for p in &t.parents {
        out.insert(p.clone());
        for gp in &o.term(p).unwrap().parents {
            out.insert(gp.clone());
        }
    }
    out
}

fn oracle_keywords(c: &ClinicalCase, o: &Ontology, use_ontology: bool) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for kw in c.problem.keywords.iter().chain(&c.environment.findings) {
        out.insert(kw.clone());
        if use_ontology {
            if let Some(id) = oracle_resolve(o, kw) {
                for a in oracle_within_two(o, &id) {
                    out.insert(norm(&o.term(&a).unwrap().name));
                }
            }
        }
    }
    out
}

fn roman_prefix(s: &str) -> &str {
    let n = s
        .chars()
        .take_while(|c| matches!(c, 'I' | 'V' | 'X' | '0'..='9'))
        .count();
    &s[..n]
}

/// Straight-line weighted similarity over the four facets.
pub fn oracle_score(
    q: &ClinicalCase,
    c: &ClinicalCase,
    raw_weights: [f64; 4],
    o: &Ontology,
    use_ontology: bool,
) -> f64 {
    let total: f64 = raw_weights.iter().sum();
    let w: Vec<f64> = raw_weights.iter().map(|x| x / total).collect();

    let diag = match (&q.diagnosis.term_id, &c.diagnosis.term_id) {
        (Some(a), Some(b)) if use_ontology => oracle_wu_palmer(o, a, b).unwrap_or(0.0),
        (Some(a), Some(b)) => f64::from(u8::from(a == b)),
        _ => 0.0,
    };
    let (ka, kb) = (oracle_keywords(q, o, use_ontology), oracle_keywords(c, o, use_ontology));
    let union = ka.union(&kb).count();
    let kw = if union == 0 {
        0.0
    } else {
        ka.intersection(&kb).count() as f64 / union as f64
    };
    let age_gap = (i64::from(q.environment.age) - i64::from(c.environment.age)).abs() as f64;
    let age = (1.0 - age_gap / 100.0).max(0.0);
    let stage = match (&q.diagnosis.stage, &c.diagnosis.stage) {
        (Some(a), Some(b)) if a == b => 1.0,
        (Some(a), Some(b)) if !roman_prefix(a).is_empty() && roman_prefix(a) == roman_prefix(b) => 0.5,
        _ => 0.0,
    };
    w[0] * diag + w[1] * kw + w[2] * age + w[3] * stage
}

/// Score every case, sort by score descending then id, keep `k`.
pub fn oracle_top_k(
    cb: &CaseBase,
    q: &ClinicalCase,
    k: usize,
    raw_weights: [f64; 4],
    o: &Ontology,
    use_ontology: bool,
) -> Vec<(String, f64)> {
    let mut all: Vec<(String, f64)> = cb
        .cases()
        .map(|c| (c.case_id.clone(), oracle_score(q, c, raw_weights, o, use_ontology)))
        .collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Fraction of (positive, negative) pairs ordered correctly, ties half.
pub fn mann_whitney(scored: &[(f64, Label)]) -> f64 {
    let pos: Vec<f64> = scored.iter().filter(|s| s.1 == Label::Positive).map(|s| s.0).collect();
    let neg: Vec<f64> = scored.iter().filter(|s| s.1 == Label::Negative).map(|s| s.0).collect();
    let mut wins = 0.0;
    for p in &pos {
        for n in &neg {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

/// Lower median by full sort.
pub fn oracle_median(mut xs: Vec<u32>) -> Option<u32> {
    if xs.is_empty() {
        return None;
    }
    xs.sort();
    Some(xs[(xs.len() - 1) / 2])
}

/// Positive share of neighbour scores, or of neighbour count if all are zero.
pub fn oracle_vote(neighbours: &[(f64, Label)]) -> f64 {
    let total: f64 = neighbours.iter().map(|n| n.0).sum();
    let pos = neighbours.iter().filter(|n| n.1 == Label::Positive);
    if total > 0.0 {
        pos.map(|n| n.0).sum::<f64>() / total
    } else {
        pos.count() as f64 / neighbours.len() as f64
    }
}

/// Keyword → case ids, rebuilt from raw case fields.
pub fn oracle_index(cb: &CaseBase) -> BTreeMap<String, BTreeSet<String>> {
    let mut idx: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for c in cb.cases() {
        for kw in c.problem.keywords.iter().chain(&c.environment.findings) {
            idx.entry(kw.clone()).or_default().insert(c.case_id.clone());
        }
    }
    idx
}

pub fn ids(ranked: &[RankedCase]) -> Vec<&str> {
    ranked.iter().map(|r| r.case_id.as_str()).collect()
}

pub mod strategies {
    use std::collections::{BTreeMap, BTreeSet};

    use chrono::NaiveDate;
    use oncodss::casebase::{
        CaseDates, CaseResult, ClinicalCase, Diagnosis, DiagnosisCode, Outcome, PatientRecord,
        Problem, Sex, TreatmentKind, TreatmentRound,
    };
    use proptest::prelude::*;

    const WORDS: &[&str] = &[
        "acid reflux", "belching", "vomiting", "palpable mass", "pyloric obstruction",
        "weight loss", "anemia", "ascites", "melena", "dysphagia", "cough", "breast lump",
        "stomach cancer", "emesis", "postoperative", "antral wall",
    ];
    const TERMS: &[&str] = &[
        "DOID:10534", "DOID:3717", "DOID:10540", "DOID:1612", "DOID:3008", "DOID:1324",
        "DOID:9256", "DOID:162",
    ];
    const STAGES: &[&str] = &["0", "I", "IIa", "IIb", "IIIa", "IIIb", "IV"];

    fn keywords() -> impl Strategy<Value = BTreeSet<String>> {
        proptest::collection::btree_set(proptest::sample::select(WORDS).prop_map(String::from), 0..5)
    }

    fn rounds() -> impl Strategy<Value = Vec<TreatmentRound>> {
        proptest::collection::btree_map(
            1u32..8,
            (
                proptest::sample::select(&[
                    TreatmentKind::Surgery,
                    TreatmentKind::Chemotherapy,
                    TreatmentKind::Radiotherapy,
                    TreatmentKind::Endoscopic,
                    TreatmentKind::Interventional,
                    TreatmentKind::Other,
                ][..]),
                "[A-Za-z0-9 +()\\-]{0,30}",
            ),
            0..4,
        )
        .prop_map(|m| {
            m.into_iter()
                .map(|(round, (kind, description))| TreatmentRound { round, kind, description })
                .collect()
        })
    }

    fn result() -> impl Strategy<Value = CaseResult> {
        prop_oneof![
            Just(CaseResult::default()),
            (
                proptest::sample::select(&[Outcome::Recovered, Outcome::Stable, Outcome::Death][..]),
                proptest::option::of(0u32..240),
            )
                .prop_map(|(outcome, survival_months)| CaseResult { outcome, survival_months }),
        ]
    }

    fn dates() -> impl Strategy<Value = Option<CaseDates>> {
        proptest::option::of((0i64..9000, proptest::option::of(0i64..3000)).prop_map(|(a, span)| {
            let base = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
            let onset = base + chrono::Duration::days(a);
            CaseDates {
                onset: Some(onset),
                closure: span.map(|s| onset + chrono::Duration::days(s)),
            }
        }))
    }

    /// A valid, already-normalized case with the given id.
    pub fn case_with_id(id: String) -> impl Strategy<Value = ClinicalCase> {
        (
            (0u32..=120, proptest::sample::select(&[Sex::Male, Sex::Female, Sex::Unknown][..])),
            keywords(),
            keywords(),
            proptest::collection::btree_map("[a-z_]{1,8}", -1e6f64..1e6, 0..3),
            proptest::option::of(proptest::sample::select(TERMS)),
            proptest::option::of(proptest::sample::select(&DiagnosisCode::ALL[..])),
            proptest::option::of(proptest::sample::select(STAGES)),
            "[ -~]{0,40}",
            (rounds(), rounds(), result(), dates()),
        )
            .prop_map(
                move |((age, sex), kws, findings, markers, term, code, stage, summary, (tr, sr, result, dates))| {
                    ClinicalCase {
                        case_id: id.clone(),
                        environment: PatientRecord {
                            age,
                            sex,
                            findings,
                            numeric_markers: markers.into_iter().collect::<BTreeMap<_, _>>(),
                        },
                        problem: Problem { keywords: kws, summary },
                        diagnosis: Diagnosis {
                            term_id: term.map(String::from),
                            code,
                            stage: stage.map(String::from),
                        },
                        prognosis: None,
                        treatment_rounds: tr,
                        support_rounds: sr,
                        result,
                        dates,
                    }
                },
            )
    }

    pub fn case() -> impl Strategy<Value = ClinicalCase> {
        "[A-Z]{2}-[0-9]{3}".prop_flat_map(case_with_id)
    }

    /// `n` cases with distinct ids.
    pub fn cases(n: usize) -> impl Strategy<Value = Vec<ClinicalCase>> {
        (0..n)
            .map(|i| case_with_id(format!("R-{i:04}")).boxed())
            .collect::<Vec<_>>()
    }
}

/// One reference evaluation row: test samples, TP, FP, TN, FN, then the
/// printed FPR, TPR (2 dp) and accuracy (percent, 2 dp).
#[derive(Debug, Clone, Copy)]
pub struct ReferenceRow {
    pub n: u64,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
    pub fpr: f64,
    pub tpr: f64,
    pub accuracy_pct: f64,
}

#[allow(clippy::too_many_arguments)]
const fn row(n: u64, tp: u64, fp: u64, tn: u64, fn_: u64, fpr: f64, tpr: f64, accuracy_pct: f64) -> ReferenceRow {
    ReferenceRow { n, tp, fp, tn, fn_, fpr, tpr, accuracy_pct }
}

pub const TABLE_WITHOUT_ONTOLOGY: [ReferenceRow; 5] = [
    row(78, 39, 17, 20, 2, 0.46, 0.95, 75.64),
    row(77, 38, 17, 18, 3, 0.48, 0.93, 72.72),
    row(77, 37, 15, 19, 6, 0.44, 0.86, 72.72),
    row(76, 37, 16, 18, 5, 0.47, 0.88, 72.36),
    row(76, 37, 15, 20, 4, 0.43, 0.90, 75.00),
];
pub const MEAN_WITHOUT_ONTOLOGY_PCT: f64 = 73.68;

pub const TABLE_WITH_ONTOLOGY: [ReferenceRow; 5] = [
    row(78, 43, 10, 23, 2, 0.30, 0.95, 84.61),
    row(77, 43, 7, 24, 3, 0.22, 0.94, 87.01),
    row(77, 42, 11, 22, 2, 0.33, 0.95, 83.11),
    row(76, 44, 8, 21, 3, 0.27, 0.94, 85.52),
    row(76, 41, 12, 22, 1, 0.35, 0.97, 82.89),
];
pub const MEAN_WITH_ONTOLOGY_PCT: f64 = 84.63;


/// Every way a reference row disagrees with the metric formulas applied to
/// its own printed counts, as `(table, row, column)` with 1-based rows.
pub fn reference_discrepancies() -> Vec<(&'static str, usize, &'static str)> {
    let mut out = Vec::new();
    for (name, table) in [("without", &TABLE_WITHOUT_ONTOLOGY), ("with", &TABLE_WITH_ONTOLOGY)] {
        for (i, r) in table.iter().enumerate() {
            let total = r.tp + r.fp + r.tn + r.fn_;
            if total != r.n {
                out.push((name, i + 1, "total"));
            }
            let acc = (r.tp + r.tn) as f64 / total as f64;
            if (acc - r.accuracy_pct / 100.0).abs() > 0.00005 {
                out.push((name, i + 1, "accuracy"));
            }
            if (r.fp as f64 / (r.fp + r.tn) as f64 - r.fpr).abs() > 0.005 {
                out.push((name, i + 1, "fpr"));
            }
            if (r.tp as f64 / (r.tp + r.fn_) as f64 - r.tpr).abs() > 0.005 {
                out.push((name, i + 1, "tpr"));
            }
        }
    }
    out
}
