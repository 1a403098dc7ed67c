//! Diagnose from clinical signs and print the matching therapy rows.

use std::collections::BTreeSet;

use oncodss::reasoning::{BreastStage, RuleBook, Sign};

fn main() -> anyhow::Result<()> {
    let rb = RuleBook::load_dir(oncodss::fixtures_dir())?;
    let signs: BTreeSet<Sign> = rb.signs_for(["pyloric obstruction", "postoperative"], Some("IIIa"));
    println!("signs: {signs:?}");
    for (code, label) in rb.diagnose(&signs)? {
        println!("{code} {label}");
        if let Ok(rule) = rb.plan_treatment(code) {
            println!("  {}", rule.render());
        }
    }
    for stage in BreastStage::ALL {
        println!("breast {stage}: {}", rb.plan_breast_stage(stage)?.render());
    }
    Ok(())
}
