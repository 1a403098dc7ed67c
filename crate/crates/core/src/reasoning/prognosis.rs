use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ReasoningError;
use crate::casebase::{CaseBase, Outcome};
use crate::similarity::RankedCase;

/// Outcome summary over a set of retrieved precedents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prognosis {
    pub n_cases: usize,
    pub outcome_counts: BTreeMap<Outcome, usize>,
    pub median_survival_months: Option<u32>,
    pub range_survival_months: Option<(u32, u32)>,
}

impl Prognosis {
    pub fn empty() -> Self {
        Prognosis {
            n_cases: 0,
            outcome_counts: BTreeMap::new(),
            median_survival_months: None,
            range_survival_months: None,
        }
    }
}

/// Aggregate the results `R` of the given cases. Median is the lower median
/// over cases that record a survival time.
pub fn prognose(similar: &[RankedCase], cb: &CaseBase) -> Result<Prognosis, ReasoningError> {
    let mut out = Prognosis::empty();
    let mut survivals = Vec::new();
    for ranked in similar {
        let case = cb
            .get(&ranked.case_id)
            .ok_or_else(|| ReasoningError::UnknownCaseId(ranked.case_id.clone()))?;
        out.n_cases += 1;
        *out.outcome_counts.entry(case.result.outcome).or_default() += 1;
        survivals.extend(case.result.survival_months);
    }
    survivals.sort_unstable();
    if let (Some(&lo), Some(&hi)) = (survivals.first(), survivals.last()) {
        out.median_survival_months = Some(survivals[(survivals.len() - 1) / 2]);
        out.range_survival_months = Some((lo, hi));
    }
    Ok(out)
}
