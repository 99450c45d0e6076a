//! Probes the offline synthetic backend through the caching prober: one
//! annotation table and one belief corpus, then the same calls again to
//! show that the second pass is served from the on-disk cache.
use persona_audit::persona::{sample_population, HumanFactor, PersonaMode, PopulationSpec, DEFAULT_PREAMBLE};
use persona_audit::probe::{run_annotation, run_generation, BeliefQuestion, Prober, ResponseCache, RetryPolicy, SyntheticModel, Vignette};
use persona_audit::task::{Construct, Domain};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cache_dir = tempfile::tempdir()?;
    let personas = sample_population(&PopulationSpec { size: 60, ..Default::default() }, 5)?;
    let model = SyntheticModel::default()
        .with_bias("caregivers", HumanFactor::Gender, 0.2, 0.6)
        .with_rating_link(Construct::Offensive, HumanFactor::PoliticalIdeology, -1.5);

    for pass in 1..=2 {
        let prober = Prober::new(Box::new(model.clone()), ResponseCache::open(cache_dir.path())?, RetryPolicy::default(), 4, 0)?;
        let vignette = Vignette::bundled_for(Construct::Offensive);
        let table = run_annotation(&prober, &personas, &vignette, PersonaMode::Explicit, &[HumanFactor::PoliticalIdeology], DEFAULT_PREAMBLE)?;
        let corpus = run_generation(&prober, &personas, &BeliefQuestion::bundled_for(Domain::Parenting), PersonaMode::Explicit, &[HumanFactor::Gender], DEFAULT_PREAMBLE)?;
        let s = prober.stats();
        println!("pass {pass}: {} ratings, {} documents, cache hits {} misses {}, backend calls {}", table.total(), corpus.len(), s.hits, s.misses, prober.backend_calls());
        if pass == 1 {
            let r = &corpus.records[0];
            println!("  prompt:   {}", r.prompt.lines().next().unwrap_or_default());
            println!("  response: {}", r.response.as_deref().unwrap_or("<missing>"));
        }
    }
    Ok(())
}
