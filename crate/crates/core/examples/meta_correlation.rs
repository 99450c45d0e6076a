//! Correlation of correlations within one domain. Gender and race share a
//! lexicon here, ideology has its own, so G-R agreement is high and the
//! ideology cells sit near zero.
use persona_audit::analysis::{bgt2_from_corpora, FeatureSource};
use persona_audit::features::NgramConfig;
use persona_audit::persona::{sample_population, HumanFactor, PersonaMode, PopulationSpec, DEFAULT_PREAMBLE};
use persona_audit::probe::{run_generation, BeliefQuestion, Prober, ResponseCache, RetryPolicy, SyntheticModel};
use persona_audit::report::DisplayTable;
use persona_audit::stats::MetaOptions;
use persona_audit::task::Domain;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let personas = sample_population(&PopulationSpec::default(), 0)?;
    let mut model = SyntheticModel::default();
    for i in 0..30 {
        let (lo, hi) = if i % 2 == 0 { (0.1, 0.6) } else { (0.6, 0.1) };
        let shared = format!("shared{}", (b'a' + i as u8) as char);
        model = model.with_bias(&shared, HumanFactor::Gender, lo, hi).with_bias(&shared, HumanFactor::Race, lo, hi);
        model = model.with_bias(&format!("ideo{}", (b'a' + i as u8) as char), HumanFactor::PoliticalIdeology, lo, hi);
    }
    let prober = Prober::new(Box::new(model), ResponseCache::in_memory(), RetryPolicy::default(), 8, 0)?;
    let question = BeliefQuestion::bundled_for(Domain::Policing);
    let corpora = [HumanFactor::Gender, HumanFactor::PoliticalIdeology, HumanFactor::Race]
        .into_iter()
        .map(|f| run_generation(&prober, &personas, &question, PersonaMode::Explicit, &[f], DEFAULT_PREAMBLE))
        .collect::<Result<Vec<_>, _>>()?;

    let source = FeatureSource::Ngrams(NgramConfig { orders: vec![1], ..NgramConfig::default() });
    let grid = bgt2_from_corpora(&corpora, &personas, &source, &MetaOptions::default(), 0.05)?;
    print!("{}", DisplayTable::from_grid(&grid).to_markdown());
    Ok(())
}
