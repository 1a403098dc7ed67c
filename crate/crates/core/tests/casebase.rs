mod common;

use std::sync::Arc;

use common::strategies;
use oncodss::casebase::{self, CaseBase, CaseBaseError, CaseStore, ClinicalCase, PatientRecord, Sex};
use proptest::prelude::*;

#[test]
fn fixture_corpus_loads_and_indexes() {
    let cb = common::cases();
    assert!(cb.len() >= 12);
    assert_eq!(cb.revision(), cb.len() as u64);
    assert!(cb.index_is_consistent());
    let idx = common::oracle_index(&cb);
    for (kw, ids) in &idx {
        assert_eq!(&cb.lookup_by_keyword(kw), ids, "{kw}");
    }
    assert_eq!(cb.keywords().count(), idx.len());
    assert!(cb.lookup_by_keyword("Pyloric  Obstruction").contains(common::STAGE_IIIA_PRECEDENT));
}

#[test]
fn precedent_carries_its_rounds_and_result() {
    let cb = common::cases();
    let c = cb.get(common::STAGE_IIIA_PRECEDENT).unwrap();
    assert_eq!(c.treatment_rounds.len(), 4);
    assert_eq!(c.treatment_rounds[0].description, "underwent radical gastrectomy");
    let sr: Vec<u32> = c.support_rounds.iter().map(|r| r.round).collect();
    assert_eq!(sr, vec![1, 2, 4]);
    assert_eq!(c.result.survival_months, Some(59));
    assert_eq!(c.diagnosis.stage.as_deref(), Some("IIIa"));
}

#[test]
fn duplicate_id_rejected_without_side_effects() {
    let mut cb = common::cases();
    let before = cb.clone();
    let dup = cb.get("GC-003").unwrap().clone();
    assert_eq!(cb.add_case(dup, None), Err(CaseBaseError::DuplicateId("GC-003".into())));
    assert!(cb.same_cases(&before));
    assert_eq!(cb.revision(), before.revision());
}

#[test]
fn unknown_or_obsolete_diagnosis_term_rejected() {
    let o = common::ontology();
    let mut cb = CaseBase::new();
    for term in ["DOID:424242", "DOID:10000"] {
        let mut c = ClinicalCase::new("X", PatientRecord::new(50, Sex::Male));
        c.diagnosis.term_id = Some(term.into());
        assert!(matches!(
            cb.add_case(c.clone(), Some(&o)),
            Err(CaseBaseError::UnknownDiagnosisTerm { .. })
        ));
        // without an ontology the term is not checked
        let mut other = CaseBase::new();
        assert_eq!(other.add_case(c, None), Ok(1));
    }
    assert!(cb.is_empty());
}

#[test]
fn invalid_cases_rejected() {
    let mut cb = CaseBase::new();
    let mut old = ClinicalCase::new("old", PatientRecord::new(151, Sex::Female));
    assert!(matches!(cb.add_case(old.clone(), None), Err(CaseBaseError::InvalidCase { .. })));
    old.environment.age = 90;
    old.result.survival_months = Some(3);
    assert!(matches!(cb.add_case(old, None), Err(CaseBaseError::InvalidCase { .. })));
    let blank = ClinicalCase::new("  ", PatientRecord::new(1, Sex::Male));
    assert!(matches!(cb.add_case(blank, None), Err(CaseBaseError::InvalidCase { .. })));
    assert_eq!(cb.revision(), 0);
}

#[test]
fn keywords_are_normalized_on_insert() {
    let mut cb = CaseBase::new();
    let mut c = ClinicalCase::new("n", PatientRecord::new(40, Sex::Male).with_findings(["  Acid   REFLUX "]));
    c.problem.keywords.insert("Palpable Mass".into());
    cb.add_case(c, None).unwrap();
    let stored = cb.get("n").unwrap();
    assert!(stored.problem.keywords.contains("palpable mass"));
    assert!(stored.environment.findings.contains("acid reflux"));
    assert_eq!(cb.lookup_by_keyword("acid reflux").len(), 1);
}

#[test]
fn remove_updates_index_and_revision() {
    let mut cb = common::cases();
    let rev = cb.revision();
    let removed = cb.remove_case(common::STAGE_IIIA_PRECEDENT).unwrap();
    assert_eq!(removed.case_id, common::STAGE_IIIA_PRECEDENT);
    assert_eq!(cb.revision(), rev + 1);
    assert!(cb.index_is_consistent());
    assert!(!cb.lookup_by_keyword("antral wall").contains(common::STAGE_IIIA_PRECEDENT));
    assert_eq!(
        cb.remove_case(common::STAGE_IIIA_PRECEDENT),
        Err(CaseBaseError::UnknownCase(common::STAGE_IIIA_PRECEDENT.into()))
    );
}

#[test]
fn empty_file_loads_to_revision_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.jsonl");
    std::fs::write(&path, "\n\n").unwrap();
    let cb = casebase::load(&path).unwrap();
    assert!(cb.is_empty());
    assert_eq!(cb.revision(), 0);
}

#[test]
fn malformed_line_reports_its_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    let good = std::fs::read_to_string(oncodss::fixtures_dir().join("gastric-cases.jsonl")).unwrap();
    let first = good.lines().next().unwrap();
    std::fs::write(&path, format!("{first}\n\n{{\"case_id\": 3}}\n")).unwrap();
    match casebase::load(&path) {
        Err(CaseBaseError::MalformedRecord { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    // duplicate ids in a file are reported against the second occurrence
    std::fs::write(&path, format!("{first}\n{first}\n")).unwrap();
    match casebase::load(&path) {
        Err(CaseBaseError::MalformedRecord { line, message }) => {
            assert_eq!(line, 2);
            assert!(message.contains("already exists"));
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        casebase::load(dir.path().join("missing.jsonl")),
        Err(CaseBaseError::IoFailure(_))
    ));
}

#[test]
fn unknown_fields_are_rejected() {
    let line = r#"{"case_id":"a","environment":{"age":3,"sex":"male"},"colour":"red"}"#;
    assert!(matches!(casebase::parse_jsonl(line), Err(CaseBaseError::MalformedRecord { line: 1, .. })));
}

#[test]
fn save_replaces_atomically_and_leaves_no_temp_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.jsonl");
    let cb = common::cases();
    casebase::save(&cb, &path).unwrap();
    casebase::save(&cb, &path).unwrap();
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names, vec!["store.jsonl"]);
    assert!(casebase::load(&path).unwrap().same_cases(&cb));
}

#[test]
fn readers_never_see_half_applied_writes() {
    let store = Arc::new(CaseStore::new(CaseBase::new()));
    let writer = {
        let store = Arc::clone(&store);
        std::thread::spawn(move || {
            for i in 0..200 {
                store
                    .mutate(|cb| {
                        let mut c = ClinicalCase::new(format!("w{i:03}"), PatientRecord::new(30, Sex::Male));
                        c.problem.keywords.insert(format!("kw{}", i % 7));
                        cb.add_case(c, None)
                    })
                    .unwrap();
            }
        })
    };
    let mut last = 0;
    while !writer.is_finished() {
        let snap = store.snapshot();
        assert_eq!(snap.revision(), snap.len() as u64);
        assert!(snap.revision() >= last);
        assert!(snap.index_is_consistent());
        last = snap.revision();
    }
    writer.join().unwrap();
    assert_eq!(store.snapshot().len(), 200);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_is_field_identical(case in strategies::case()) {
        let text = serde_json::to_string(&case).unwrap();
        let back: ClinicalCase = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, case);
    }

    #[test]
    fn index_equals_rebuilt_inversion(cases in strategies::cases(30), drop in proptest::collection::vec(any::<bool>(), 30)) {
        let mut cb = CaseBase::new();
        for c in cases.clone() {
            cb.add_case(c, None).unwrap();
        }
        for (c, d) in cases.iter().zip(drop) {
            if d {
                cb.remove_case(&c.case_id).unwrap();
            }
        }
        prop_assert!(cb.index_is_consistent());
        let idx = common::oracle_index(&cb);
        for (kw, ids) in &idx {
            prop_assert_eq!(&cb.lookup_by_keyword(kw), ids);
        }
        prop_assert_eq!(cb.keywords().count(), idx.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn save_load_round_trips_two_hundred_cases(cases in strategies::cases(200)) {
        let mut cb = CaseBase::new();
        for c in cases {
            cb.add_case(c, Some(&common::ontology())).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cases.jsonl");
        casebase::save(&cb, &path).unwrap();
        let back = casebase::load(&path).unwrap();
        prop_assert!(back.same_cases(&cb));
        prop_assert_eq!(back.revision(), 200);
        prop_assert!(back.index_is_consistent());
    }
}
