//! Differential language analysis on a synthetic corpus: which words do
//! female and male personas use differently when asked about parenting?
use persona_audit::analysis::{bgt1, FeatureSource};
use persona_audit::persona::{sample_population, HumanFactor, PersonaMode, PopulationSpec, DEFAULT_PREAMBLE};
use persona_audit::probe::{run_generation, BeliefQuestion, Prober, ResponseCache, RetryPolicy, SyntheticModel};
use persona_audit::task::Domain;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let personas = sample_population(&PopulationSpec::default(), 0)?;
    let model = SyntheticModel::default()
        .with_bias("caregivers", HumanFactor::Gender, 0.2, 0.6)
        .with_bias("provider", HumanFactor::Gender, 0.5, 0.15);
    let prober = Prober::new(Box::new(model), ResponseCache::in_memory(), RetryPolicy::default(), 8, 0)?;
    let question = BeliefQuestion::bundled_for(Domain::Parenting);
    println!("Q: {}", question.text);
    let corpus = run_generation(&prober, &personas, &question, PersonaMode::Explicit, &[HumanFactor::Gender], DEFAULT_PREAMBLE)?;

    let r = bgt1(&corpus, &personas, HumanFactor::Gender, &FeatureSource::default(), 0.05)?;
    println!("{} features tested, {} significant after BH", r.full.results.len(), r.significant.len());
    for e in r.significant.iter().take(10) {
        println!("  {:<14} d = {:+.3}  adj p = {:.2e}  count {}", e.feature, e.effect, e.adjusted_p, r.frequencies[&e.feature]);
    }
    Ok(())
}
