//! Tokenizes a handful of answers and builds the relative-frequency
//! n-gram matrix used by the language studies.
use persona_audit::features::{extract_ngrams, tokenize, NgramConfig};

fn main() {
    let docs = [
        "I've seen the conflict for decades, and I've changed my mind.",
        "Parents should share caregiving; caregivers need support.",
        "Decades of history matter. I've read a lot about it.",
        "Caregivers and parents deserve support from employers.",
        "I've no strong view, but history matters to me.",
    ];
    println!("tokens: {:?}", tokenize(docs[0]));

    let pairs: Vec<(u64, &str)> = docs.iter().enumerate().map(|(i, d)| (i as u64, *d)).collect();
    let cfg = NgramConfig { orders: vec![1, 2], min_doc_count: 2 };
    let m = extract_ngrams(&pairs, &cfg).expect("vocabulary is non-empty");
    println!("{} documents x {} features (min doc count {})", m.n_docs(), m.n_features(), cfg.min_doc_count);
    for (j, f) in m.features().iter().enumerate() {
        let col: Vec<String> = m.dense_column(j).iter().map(|v| format!("{v:.3}")).collect();
        println!("  {:<12} n={} docs={} [{}]", f.id, f.order, f.doc_count, col.join(" "));
    }
}
