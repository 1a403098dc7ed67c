//! Load the bundled ontology, resolve a synonym and compare two diseases.

use oncodss::ontology::Ontology;

fn main() -> anyhow::Result<()> {
    let o = Ontology::load(oncodss::fixtures_dir().join("mini-do.obo"))?;
    let hit = o.resolve("stomach cancer").expect("synonym in fixture");
    println!("'stomach cancer' resolves to {} ({})", hit.id, o.term(&hit.id).unwrap().name);

    for id in o.ancestors(&hit.id)? {
        println!("  ancestor {id:<12} depth {}", o.depth(id)?);
    }

    let (a, b) = ("DOID:10534", "DOID:1612");
    println!(
        "Wu-Palmer({a}, {b}) = {:.4} via {}",
        o.term_similarity(a, b)?,
        o.lowest_common_ancestor(a, b)?
    );
    for t in o.triples_about("gastric cancer") {
        println!("  {} {} {}", t.subject, t.relation, t.object);
    }
    Ok(())
}
