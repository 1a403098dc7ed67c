//! Full consult for a 40-year-old man with stage IIIa gastric cancer and
//! pyloric obstruction.

use oncodss::casebase::{PatientRecord, Sex};
use oncodss::cli::render_answer;
use oncodss::service::{consult, ConsultRequest, Knowledge};

fn main() -> anyhow::Result<()> {
    let k = Knowledge::bundled()?;
    let req = ConsultRequest {
        text: "Gastric cancer at the postoperative stage. High-differentiated adenocarcinoma, \
               pyloric obstruction, palpable mass, abnormal thickening of antral wall and mucosa"
            .into(),
        patient: PatientRecord::new(40, Sex::Male),
        stage: Some("IIIa".into()),
        k: None,
    };
    let answer = consult(&req, &k)?;
    print!("{}", render_answer(&answer));
    let top = &answer.similar_cases[0].case;
    println!("\nClosest precedent {}:", top.case_id);
    for r in &top.treatment_rounds {
        println!("  treatment round {}: {}", r.round, r.description);
    }
    for r in &top.support_rounds {
        println!("  support round {}: {}", r.round, r.description);
    }
    Ok(())
}
