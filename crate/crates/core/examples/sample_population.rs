//! Draws the default 641-persona population and prints its composition.
use persona_audit::persona::{render_prompt, sample_population, HumanFactor, PersonaMode, PopulationSpec, DEFAULT_PREAMBLE};

fn main() {
    let spec = PopulationSpec::default();
    let set = sample_population(&spec, spec.seed).expect("default spec is valid");
    println!("{} personas", set.len());
    for f in HumanFactor::ALL.into_iter().filter(|f| f.is_binary()) {
        println!(
            "  {:<20} {} {:>4} / {} {:>4}",
            f.title(),
            f.positive_label().unwrap(),
            set.count(f, 1),
            f.negative_label().unwrap(),
            set.count(f, 0)
        );
    }
    let ages: Vec<f64> = set.iter().filter_map(|p| p.value(HumanFactor::Age)).map(f64::from).collect();
    println!("  mean age {:.1}", ages.iter().sum::<f64>() / ages.len() as f64);

    let first = set.iter().next().unwrap();
    let prompt = render_prompt(first, PersonaMode::Explicit, &HumanFactor::ALL, DEFAULT_PREAMBLE).unwrap();
    println!("\npersona {}: {prompt}", first.id);
}
