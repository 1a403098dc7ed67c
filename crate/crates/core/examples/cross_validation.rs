//! Five-fold cross-validation on the synthetic corpus, with and without the
//! ontology, plus the pooled ROC curve.

use oncodss::eval::{self, CvConfig};
use oncodss::ontology::Ontology;
use oncodss::service::evaluate;

fn main() -> anyhow::Result<()> {
    let dir = oncodss::fixtures_dir().join("synthetic");
    let o = Ontology::load(dir.join("ontology.obo"))?;
    let data = eval::load_labeled(dir.join("labeled.jsonl"))?;
    for use_ontology in [true, false] {
        let out = evaluate(&data, &CvConfig { use_ontology, ..CvConfig::default() }, &o)?;
        println!("use_ontology = {use_ontology}");
        print!("{}", out.table);
        println!("AUC\t{:.4}\n", out.roc.auc);
    }
    Ok(())
}
