//! Turns an effect table into positive and negative word clouds and writes
//! them as SVG files (to the directory given as the first argument, or the
//! system temp dir).
use std::collections::BTreeMap;
use std::path::PathBuf;

use persona_audit::report::{render_svg, wordcloud_data, LayoutParams};
use persona_audit::stats::{EffectOutcome, EffectTable, FeatureEffect, TableMeta};

const TERMS: &[(&str, f64, u64)] = &[
    ("i've", 0.368, 310),
    ("decades", 0.30, 120),
    ("history", 0.22, 95),
    ("witnessed", 0.19, 40),
    ("generations", 0.17, 33),
    ("seen", 0.15, 150),
    ("long", 0.12, 80),
    ("like", -0.28, 400),
    ("honestly", -0.21, 70),
    ("tiktok", -0.18, 22),
    ("unfair", -0.14, 60),
    ("genocide", -0.13, 45),
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let outcomes = TERMS
        .iter()
        .map(|&(t, effect, _)| (t.to_string(), EffectOutcome::Computed(FeatureEffect { effect, raw_p: 1e-6, n: 641, converged: None })))
        .collect();
    let table = EffectTable::from_outcomes(TableMeta { label: "palestine/explicit/age:age".into(), ..Default::default() }, 0.05, outcomes)?;
    let freq: BTreeMap<String, u64> = TERMS.iter().map(|&(t, _, n)| (t.to_string(), n)).collect();
    let data = wordcloud_data(&table, &freq, 50);

    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&out)?;
    for (side, entries) in [("positive", &data.positive), ("negative", &data.negative)] {
        for e in entries.iter() {
            println!("{side:<8} {:<12} size {:.2} {:?}", e.term, e.size, e.bucket);
        }
        let rendered = render_svg(entries, &LayoutParams::default())?;
        let path = out.join(format!("age_{side}.svg"));
        std::fs::write(&path, &rendered.svg)?;
        println!("-> {} ({} placed)", path.display(), rendered.placed.len());
    }
    Ok(())
}
