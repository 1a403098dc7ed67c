//! Sign → diagnosis inference and diagnosis → therapy rule tables.
//!
//! The gastric table maps diagnosis codes `D1`..`D6` to therapy codes
//! `PC1`..`PC6`; the breast table maps clinical stages to modality plans.
//! Both ship as JSON data so edits need no rebuild.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ReasoningError;
use crate::casebase::DiagnosisCode;
use crate::similarity::stage_numeral;
use crate::text::normalize_keyword;

/// Clinical sign predicates recognised by the gastric diagnosis rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    EarlyStage,
    NoLymphNodeMetastasis,
    LymphNodeMetastasis,
    LocallyAdvanced,
    Unresectable,
    Recurrence,
    Metastasis,
    PyloricObstruction,
}

impl Sign {
    pub const ALL: [Sign; 8] = [
        Sign::EarlyStage,
        Sign::NoLymphNodeMetastasis,
        Sign::LymphNodeMetastasis,
        Sign::LocallyAdvanced,
        Sign::Unresectable,
        Sign::Recurrence,
        Sign::Metastasis,
        Sign::PyloricObstruction,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosisRule {
    pub code: DiagnosisCode,
    pub label: String,
    #[serde(default)]
    pub required_signs: BTreeSet<Sign>,
    #[serde(default)]
    pub excluded_signs: BTreeSet<Sign>,
    /// At least one of these must hold, when non-empty.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub any_signs: BTreeSet<Sign>,
}

impl DiagnosisRule {
    pub fn matches(&self, signs: &BTreeSet<Sign>) -> bool {
        self.required_signs.is_subset(signs)
            && self.excluded_signs.is_disjoint(signs)
            && (self.any_signs.is_empty() || !self.any_signs.is_disjoint(signs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TherapyCode {
    PC1,
    PC2,
    PC3,
    PC4,
    PC5,
    PC6,
}

impl fmt::Display for TherapyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BreastStage {
    #[serde(rename = "0")]
    Zero,
    I,
    #[serde(rename = "earlyII")]
    EarlyII,
    II,
    III,
    IV,
}

impl BreastStage {
    pub const ALL: [BreastStage; 6] = [
        BreastStage::Zero,
        BreastStage::I,
        BreastStage::EarlyII,
        BreastStage::II,
        BreastStage::III,
        BreastStage::IV,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BreastStage::Zero => "0",
            BreastStage::I => "I",
            BreastStage::EarlyII => "earlyII",
            BreastStage::II => "II",
            BreastStage::III => "III",
            BreastStage::IV => "IV",
        }
    }
}

impl fmt::Display for BreastStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BreastStage {
    type Err = ReasoningError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BreastStage::ALL
            .into_iter()
            .find(|st| st.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ReasoningError::UnknownStage(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Surgery,
    Radiotherapy,
    Chemotherapy,
    Endocrine,
}

/// `+` in a stage plan is mandatory, `±` (or "or") is conditional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Requirement {
    Mandatory,
    Conditional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "table", content = "keys", rename_all = "snake_case")]
pub enum RuleScope {
    Gastric(Vec<DiagnosisCode>),
    BreastStage(Vec<BreastStage>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TherapyRule {
    pub scope: RuleScope,
    #[serde(default)]
    pub therapy_codes: Vec<TherapyCode>,
    #[serde(default)]
    pub modalities: BTreeMap<Modality, Requirement>,
    pub narrative: String,
}

impl TherapyRule {
    /// One tab-separated line: keys, codes or modalities, narrative.
    pub fn render(&self) -> String {
        let keys = match &self.scope {
            RuleScope::Gastric(codes) => join(codes, "/"),
            RuleScope::BreastStage(stages) => join(stages, "/"),
        };
        let plan = if self.therapy_codes.is_empty() {
            self.modalities
                .iter()
                .map(|(m, r)| format!("{}={}", json_name(m), json_name(r)))
                .collect::<Vec<_>>()
                .join(",")
        } else {
            join(&self.therapy_codes, "+")
        };
        format!("{keys}\t{plan}\t{}", self.narrative)
    }
}

fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

fn json_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GastricTherapyRow {
    codes: Vec<DiagnosisCode>,
    therapy_codes: Vec<TherapyCode>,
    narrative: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GastricRulesFile {
    diagnosis_rules: Vec<DiagnosisRule>,
    therapy_rules: Vec<GastricTherapyRow>,
    #[serde(default)]
    sign_phrases: BTreeMap<String, Vec<Sign>>,
    #[serde(default)]
    stage_signs: BTreeMap<String, Vec<Sign>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BreastPlanRow {
    stages: Vec<BreastStage>,
    modalities: BTreeMap<Modality, Requirement>,
    narrative: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BreastStagesFile {
    plans: Vec<BreastPlanRow>,
}

/// Validated rule tables plus the phrase → sign lexicon used to derive signs
/// from interpreted text.
#[derive(Debug, Clone)]
pub struct RuleBook {
    diagnosis_rules: Vec<DiagnosisRule>,
    therapy: BTreeMap<DiagnosisCode, TherapyRule>,
    breast: BTreeMap<BreastStage, TherapyRule>,
    sign_phrases: BTreeMap<String, Vec<Sign>>,
    stage_signs: BTreeMap<String, Vec<Sign>>,
}

impl RuleBook {
    /// Load `gastric-rules.json` and `breast-stages.json` from `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, ReasoningError> {
        let dir = dir.as_ref();
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path)
                .map_err(|e| ReasoningError::Io(format!("{}: {e}", path.display())))
        };
        Self::from_json(&read("gastric-rules.json")?, &read("breast-stages.json")?)
    }

    pub fn from_json(gastric: &str, breast: &str) -> Result<Self, ReasoningError> {
        let invalid = |e: serde_json::Error| ReasoningError::InvalidRuleSet(e.to_string());
        let gastric: GastricRulesFile = serde_json::from_str(gastric).map_err(invalid)?;
        let breast: BreastStagesFile = serde_json::from_str(breast).map_err(invalid)?;

        validate_diagnosis_rules(&gastric.diagnosis_rules)?;

        let mut therapy = BTreeMap::new();
        for row in gastric.therapy_rules {
            if row.therapy_codes.is_empty() {
                return Err(ReasoningError::InvalidRuleSet(format!(
                    "therapy row {:?} has no therapy codes",
                    row.codes
                )));
            }
            let rule = TherapyRule {
                scope: RuleScope::Gastric(row.codes.clone()),
                therapy_codes: row.therapy_codes,
                modalities: BTreeMap::new(),
                narrative: row.narrative,
            };
            for code in row.codes {
                if code == DiagnosisCode::D0 {
                    return Err(ReasoningError::InvalidRuleSet("D0 has no therapy row".into()));
                }
                if therapy.insert(code, rule.clone()).is_some() {
                    return Err(ReasoningError::InvalidRuleSet(format!("{code} has two therapy rows")));
                }
            }
        }
        if therapy.len() != 6 {
            return Err(ReasoningError::InvalidRuleSet(
                "therapy rows must cover exactly D1..D6".into(),
            ));
        }

        let mut plans = BTreeMap::new();
        for row in breast.plans {
            if row.modalities.is_empty() {
                return Err(ReasoningError::InvalidRuleSet(format!(
                    "stage plan {:?} lists no modality",
                    row.stages
                )));
            }
            let rule = TherapyRule {
                scope: RuleScope::BreastStage(row.stages.clone()),
                therapy_codes: Vec::new(),
                modalities: row.modalities,
                narrative: row.narrative,
            };
            for stage in row.stages {
                if plans.insert(stage, rule.clone()).is_some() {
                    return Err(ReasoningError::InvalidRuleSet(format!("stage {stage} planned twice")));
                }
            }
        }
        if plans.len() != BreastStage::ALL.len() {
            return Err(ReasoningError::InvalidRuleSet(
                "breast plans must cover every stage".into(),
            ));
        }

        Ok(RuleBook {
            diagnosis_rules: gastric.diagnosis_rules,
            therapy,
            breast: plans,
            sign_phrases: gastric
                .sign_phrases
                .into_iter()
                .map(|(k, v)| (normalize_keyword(&k), v))
                .collect(),
            stage_signs: gastric.stage_signs,
        })
    }

    pub fn diagnosis_rules(&self) -> &[DiagnosisRule] {
        &self.diagnosis_rules
    }

    pub fn diagnose(&self, signs: &BTreeSet<Sign>) -> Result<Vec<(DiagnosisCode, String)>, ReasoningError> {
        diagnose(signs, &self.diagnosis_rules)
    }

    pub fn plan_treatment(&self, code: DiagnosisCode) -> Result<&TherapyRule, ReasoningError> {
        self.therapy
            .get(&code)
            .ok_or_else(|| ReasoningError::UnknownDiagnosisCode(code.to_string()))
    }

    pub fn plan_breast_stage(&self, stage: BreastStage) -> Result<&TherapyRule, ReasoningError> {
        self.breast
            .get(&stage)
            .ok_or_else(|| ReasoningError::UnknownStage(stage.to_string()))
    }

    /// Phrases that imply a sign; the interpreter adds these to its lexicon.
    pub fn sign_phrases(&self) -> impl Iterator<Item = &str> {
        self.sign_phrases.keys().map(String::as_str)
    }

    /// Signs implied by normalized keywords and a stage label.
    pub fn signs_for<'a>(
        &self,
        keywords: impl IntoIterator<Item = &'a str>,
        stage: Option<&str>,
    ) -> BTreeSet<Sign> {
        let mut signs: BTreeSet<Sign> = keywords
            .into_iter()
            .filter_map(|k| self.sign_phrases.get(k))
            .flatten()
            .copied()
            .collect();
        if let Some(extra) = stage.and_then(|s| self.stage_signs.get(stage_numeral(s.trim()))) {
            signs.extend(extra);
        }
        signs
    }
}

fn validate_diagnosis_rules(rules: &[DiagnosisRule]) -> Result<(), ReasoningError> {
    let mut seen = BTreeSet::new();
    for rule in rules {
        if !seen.insert(rule.code) {
            return Err(ReasoningError::InvalidRuleSet(format!("duplicate rule {}", rule.code)));
        }
        if !rule.required_signs.is_disjoint(&rule.excluded_signs) {
            return Err(ReasoningError::InvalidRuleSet(format!(
                "rule {} both requires and excludes a sign",
                rule.code
            )));
        }
    }
    Ok(())
}

/// Every rule `D1`..`D6` whose signs hold, in code order, preceded by `D0`
/// whenever at least one of them matched.
pub fn diagnose(
    signs: &BTreeSet<Sign>,
    rules: &[DiagnosisRule],
) -> Result<Vec<(DiagnosisCode, String)>, ReasoningError> {
    if rules.is_empty() {
        return Err(ReasoningError::EmptyRuleSet);
    }
    let mut hits: Vec<&DiagnosisRule> = rules
        .iter()
        .filter(|r| r.code != DiagnosisCode::D0 && r.matches(signs))
        .collect();
    if hits.is_empty() {
        return Ok(Vec::new());
    }
    hits.sort_by_key(|r| r.code);
    let positive = rules
        .iter()
        .find(|r| r.code == DiagnosisCode::D0)
        .map(|r| r.label.clone())
        .unwrap_or_else(|| "Gastric cancer".to_string());
    Ok(std::iter::once((DiagnosisCode::D0, positive))
        .chain(hits.into_iter().map(|r| (r.code, r.label.clone())))
        .collect())
}
