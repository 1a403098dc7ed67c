use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::text::{is_normalized, normalize_keyword};

/// Oldest age accepted in a patient record.
pub const MAX_AGE: u32 = 150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Male,
    Female,
    Unknown,
}

impl FromStr for Sex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "m" | "male" => Ok(Sex::Male),
            "f" | "female" => Ok(Sex::Female),
            "u" | "unknown" => Ok(Sex::Unknown),
            other => Err(format!("unknown sex {other:?}; expected m, f or unknown")),
        }
    }
}

/// Environment `E`: the patient record attached to a case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatientRecord {
    pub age: u32,
    pub sex: Sex,
    #[serde(default)]
    pub findings: BTreeSet<String>,
    /// Marker name → value. Units are carried in the name, e.g. `cea_ng_ml`.
    #[serde(default)]
    pub numeric_markers: BTreeMap<String, f64>,
}

impl PatientRecord {
    pub fn new(age: u32, sex: Sex) -> Self {
        PatientRecord {
            age,
            sex,
            findings: BTreeSet::new(),
            numeric_markers: BTreeMap::new(),
        }
    }

    pub fn with_findings<I, S>(mut self, findings: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.findings
            .extend(findings.into_iter().map(|f| normalize_keyword(f.as_ref())));
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.age > MAX_AGE {
            return Err(format!("age {} exceeds {MAX_AGE}", self.age));
        }
        if let Some(f) = self.findings.iter().find(|f| f.is_empty() || !is_normalized(f)) {
            return Err(format!("finding {f:?} is not normalized"));
        }
        if let Some((name, _)) = self.numeric_markers.iter().find(|(_, v)| !v.is_finite()) {
            return Err(format!("marker {name} is not finite"));
        }
        Ok(())
    }

    fn normalize(&mut self) {
        self.findings = self
            .findings
            .iter()
            .map(|f| normalize_keyword(f))
            .filter(|f| !f.is_empty())
            .collect();
    }
}

/// Problem `PB`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    #[serde(default)]
    pub keywords: BTreeSet<String>,
    #[serde(default)]
    pub summary: String,
}

/// Gastric diagnosis codes `D0`..`D6`. `D0` is the positive diagnosis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DiagnosisCode {
    D0,
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
}

impl DiagnosisCode {
    pub const ALL: [DiagnosisCode; 7] = [
        DiagnosisCode::D0,
        DiagnosisCode::D1,
        DiagnosisCode::D2,
        DiagnosisCode::D3,
        DiagnosisCode::D4,
        DiagnosisCode::D5,
        DiagnosisCode::D6,
    ];
}

impl fmt::Display for DiagnosisCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for DiagnosisCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DiagnosisCode::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown diagnosis code {s:?}"))
    }
}

/// Diagnosis `Δ`: ontology term, rule-table code and stage label.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnosis {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<DiagnosisCode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreatmentKind {
    Surgery,
    Chemotherapy,
    Radiotherapy,
    Endoscopic,
    Interventional,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreatmentRound {
    pub round: u32,
    pub kind: TreatmentKind,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Recovered,
    Stable,
    Death,
    Unknown,
}

/// Result `R`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseResult {
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub survival_months: Option<u32>,
}

impl Default for CaseResult {
    fn default() -> Self {
        CaseResult {
            outcome: Outcome::Unknown,
            survival_months: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseDates {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub onset: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<NaiveDate>,
}

/// A stored clinical case.
///
/// `treatment_rounds` and `support_rounds` are the Θ and SΘ directories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClinicalCase {
    pub case_id: String,
    pub environment: PatientRecord,
    #[serde(default)]
    pub problem: Problem,
    #[serde(default)]
    pub diagnosis: Diagnosis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prognosis: Option<String>,
    #[serde(default)]
    pub treatment_rounds: Vec<TreatmentRound>,
    #[serde(default)]
    pub support_rounds: Vec<TreatmentRound>,
    #[serde(default)]
    pub result: CaseResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dates: Option<CaseDates>,
}

impl ClinicalCase {
    pub fn new(case_id: impl Into<String>, environment: PatientRecord) -> Self {
        ClinicalCase {
            case_id: case_id.into(),
            environment,
            problem: Problem::default(),
            diagnosis: Diagnosis::default(),
            prognosis: None,
            treatment_rounds: Vec::new(),
            support_rounds: Vec::new(),
            result: CaseResult::default(),
            dates: None,
        }
    }

    /// Keywords the case is indexed under: `PB` keywords plus `E` findings.
    pub fn index_keywords(&self) -> impl Iterator<Item = &String> {
        self.problem.keywords.iter().chain(&self.environment.findings)
    }

    /// Rewrite keywords and findings into normalized form.
    pub fn normalize(&mut self) {
        self.problem.keywords = self
            .problem
            .keywords
            .iter()
            .map(|k| normalize_keyword(k))
            .filter(|k| !k.is_empty())
            .collect();
        self.environment.normalize();
        if let Some(stage) = &mut self.diagnosis.stage {
            *stage = stage.trim().to_string();
        }
    }

    /// Structural invariants. Ontology membership is checked by the case base.
    pub fn validate(&self) -> Result<(), String> {
        if self.case_id.trim().is_empty() {
            return Err("case_id is empty".into());
        }
        self.environment.validate()?;
        if let Some(k) = self.problem.keywords.iter().find(|k| k.is_empty() || !is_normalized(k)) {
            return Err(format!("problem keyword {k:?} is not normalized"));
        }
        check_rounds("treatment_rounds", &self.treatment_rounds)?;
        check_rounds("support_rounds", &self.support_rounds)?;
        if self.result.survival_months.is_some() && self.result.outcome == Outcome::Unknown {
            return Err("survival_months requires a known outcome".into());
        }
        if let Some(CaseDates {
            onset: Some(onset),
            closure: Some(closure),
        }) = &self.dates
        {
            if closure < onset {
                return Err(format!("closure {closure} precedes onset {onset}"));
            }
        }
        Ok(())
    }
}

fn check_rounds(field: &str, rounds: &[TreatmentRound]) -> Result<(), String> {
    let mut last = 0;
    for r in rounds {
        if r.round == 0 {
            return Err(format!("{field}: round numbers start at 1"));
        }
        if r.round <= last {
            return Err(format!(
                "{field}: round {} does not follow round {last}",
                r.round
            ));
        }
        last = r.round;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ClinicalCase {
        ClinicalCase::new("c1", PatientRecord::new(40, Sex::Male))
    }

    fn round(n: u32) -> TreatmentRound {
        TreatmentRound {
            round: n,
            kind: TreatmentKind::Surgery,
            description: "x".into(),
        }
    }

    #[test]
    fn repeated_round_numbers_rejected() {
        let mut c = base();
        c.treatment_rounds = vec![round(1), round(1)];
        assert!(c.validate().unwrap_err().contains("treatment_rounds"));
    }

    #[test]
    fn gaps_in_rounds_are_fine() {
        // SΘ in the reference case skips round 3
        let mut c = base();
        c.support_rounds = vec![round(1), round(2), round(4)];
        assert!(c.validate().is_ok());
    }

    #[test]
    fn survival_needs_known_outcome() {
        let mut c = base();
        c.result.survival_months = Some(3);
        assert!(c.validate().is_err());
        c.result.outcome = Outcome::Stable;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn age_bound() {
        let mut c = base();
        c.environment.age = 151;
        assert!(c.validate().is_err());
        c.environment.age = 150;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn normalize_fixes_findings() {
        let mut c = base();
        c.environment.findings.insert(" Vomiting ".into());
        c.environment.findings.insert("vomiting".into());
        assert!(c.validate().is_err());
        c.normalize();
        assert_eq!(c.environment.findings.len(), 1);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn closure_before_onset_rejected() {
        let mut c = base();
        c.dates = Some(CaseDates {
            onset: NaiveDate::from_ymd_opt(2010, 5, 1),
            closure: NaiveDate::from_ymd_opt(2009, 1, 1),
        });
        assert!(c.validate().is_err());
    }

    #[test]
    fn codes_parse() {
        assert_eq!("d3".parse::<DiagnosisCode>().unwrap(), DiagnosisCode::D3);
        assert!("D7".parse::<DiagnosisCode>().is_err());
        assert_eq!(serde_json::to_string(&DiagnosisCode::D6).unwrap(), "\"D6\"");
    }
}
