//! Annotation study and rater reliability: how strongly ideology shifts
//! offensiveness ratings, and how well explicit and implicit personas
//! agree with each other.
use persona_audit::analysis::{annotation_effects, reliability, PersonaType};
use persona_audit::persona::{assign_names, sample_population, HumanFactor, NameTable, PersonaMode, PopulationSpec, DEFAULT_PREAMBLE};
use persona_audit::probe::{run_annotation, Prober, ResponseCache, RetryPolicy, SyntheticModel, Vignette};
use persona_audit::report::DisplayTable;
use persona_audit::task::Construct;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let personas = sample_population(&PopulationSpec::default(), 0)?;
    let mut model = SyntheticModel::default()
        .with_rating_link(Construct::Offensive, HumanFactor::PoliticalIdeology, -1.5)
        .with_rating_link(Construct::Offensive, HumanFactor::Gender, 0.8);
    model.implicit_signal = 0.5;
    let prober = Prober::new(Box::new(model), ResponseCache::in_memory(), RetryPolicy::default(), 8, 0)?;
    let vignette = Vignette::bundled_for(Construct::Offensive);

    let mut tables = Vec::new();
    for f in HumanFactor::ALL {
        tables.push(run_annotation(&prober, &personas, &vignette, PersonaMode::Explicit, &[f], DEFAULT_PREAMBLE)?);
    }
    let grid = annotation_effects(&tables, &personas, 0.05)?;
    print!("{}", DisplayTable::from_grid(&grid).to_markdown());

    let named = assign_names(&personas, &NameTable::bundled(), HumanFactor::Gender, 2024, 0)?;
    let implicit = run_annotation(&prober, &named, &vignette, PersonaMode::Implicit, &[HumanFactor::Gender], DEFAULT_PREAMBLE)?;
    let explicit = &tables[1];
    // Synthetic raters draw each label independently, so agreement sits at
    // chance; over five posts the expected kappa of two such raters is
    // -1/9 rather than 0.
    println!("\nexplicit vs implicit (gender personas)");
    for who in [PersonaType::All, PersonaType::ROWS[3], PersonaType::ROWS[4]] {
        let k = reliability(explicit, &personas, &implicit, &named, who)?;
        println!("  {:<8} kappa {:.3}", who.title(), k.mean);
    }
    Ok(())
}
