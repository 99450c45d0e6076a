//! Scores documents against a small `category<TAB>term` lexicon; `*`
//! marks a prefix match.
use persona_audit::features::{score_lexicon, Lexicon};

const LEXICON: &str = "\
family\tparent*
family\tcaregiver*
family\tchild*
time\tdecade*
time\tyears
negemo\tworr*
negemo\tafraid
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lex = Lexicon::from_tsv("demo", LEXICON.as_bytes())?;
    let docs = [
        (1, "Parents and caregivers worry about their children."),
        (2, "For decades, over many years, nothing changed."),
        (3, "I am afraid of nothing."),
    ];
    let m = score_lexicon(&docs, &lex)?;
    print!("{:>4}", "doc");
    for f in m.features() {
        print!(" {:>8}", f.id);
    }
    println!();
    for (i, id) in m.doc_ids().iter().enumerate() {
        print!("{id:>4}");
        for j in 0..m.n_features() {
            print!(" {:>8.3}", m.value(i, j));
        }
        println!();
    }
    Ok(())
}
