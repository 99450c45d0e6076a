//! Synthetic persona populations.
//!
//! A population is declared as a [`PopulationSpec`] (proportions for the
//! binary human factors plus an age distribution) and realized by
//! [`sample_population`]. Binary labels are apportioned with exact counts
//! and assigned by independent seeded shuffles, so two factors are never
//! correlated by construction.

mod names;
mod prompt;

pub use names::{assign_names, NameLabel, NameRow, NameSlot, NameTable};
pub use prompt::{explicit_clause, render_prompt, DEFAULT_PREAMBLE};

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PersonaError {
    #[error("proportion for {factor} must lie in [0, 1], got {value}")]
    InvalidProportion { factor: HumanFactor, value: f64 },
    #[error("{0} is continuous and cannot carry a binary proportion")]
    NotBinary(HumanFactor),
    #[error("population size must be positive")]
    EmptyPopulation,
    #[error("age standard deviation must be positive and finite, got {0}")]
    InvalidAgeSd(f64),
    #[error("age mean must be finite, got {0}")]
    InvalidAgeMean(f64),
    #[error("age clamp [{0}, {1}] is empty")]
    InvalidAgeClamp(u32, u32),
    #[error("name table has no rows for {0}")]
    NoNamesForFactor(HumanFactor),
    #[error("no {slot} names for persona {persona} ({factor} = {label})")]
    NoMatchingNames {
        persona: u64,
        factor: HumanFactor,
        slot: NameSlot,
        label: String,
    },
    #[error("names carry no signal for {0}")]
    NoNameSignal(HumanFactor),
    #[error("persona {persona} has no value for {factor}")]
    MissingFactor { persona: u64, factor: HumanFactor },
    #[error("implicit personas cannot express {0}")]
    ImplicitUnsupported(HumanFactor),
    #[error("persona {0} has no name, implicit mode needs one")]
    MissingName(u64),
    #[error("name table line {line}: {message}")]
    NameTable { line: usize, message: String },
    #[error("persona line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = PersonaError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    Continuous,
    Binary,
}

/// The five human factors. Declaration order is the reporting order
/// (age, gender, political ideology, race, substance use).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema,
)]
#[serde(rename_all = "snake_case")]
pub enum HumanFactor {
    Age,
    Gender,
    PoliticalIdeology,
    Race,
    SubstanceUse,
}

impl HumanFactor {
    pub const ALL: [HumanFactor; 5] = [
        HumanFactor::Age,
        HumanFactor::Gender,
        HumanFactor::PoliticalIdeology,
        HumanFactor::Race,
        HumanFactor::SubstanceUse,
    ];

    pub const BINARY: [HumanFactor; 4] = [
        HumanFactor::Gender,
        HumanFactor::PoliticalIdeology,
        HumanFactor::Race,
        HumanFactor::SubstanceUse,
    ];

    /// Factors that a first name (and surname) can signal.
    pub const IMPLICIT: [HumanFactor; 3] =
        [HumanFactor::Age, HumanFactor::Gender, HumanFactor::Race];

    pub fn kind(self) -> FactorKind {
        match self {
            HumanFactor::Age => FactorKind::Continuous,
            _ => FactorKind::Binary,
        }
    }

    pub fn is_binary(self) -> bool {
        self.kind() == FactorKind::Binary
    }

    pub fn supports_implicit(self) -> bool {
        Self::IMPLICIT.contains(&self)
    }

    /// Label encoded as 1.
    pub fn positive_label(self) -> Option<&'static str> {
        match self {
            HumanFactor::Age => None,
            HumanFactor::Gender => Some("female"),
            HumanFactor::PoliticalIdeology => Some("conservative"),
            HumanFactor::Race => Some("black"),
            HumanFactor::SubstanceUse => Some("uses_substances"),
        }
    }

    /// Label encoded as 0.
    pub fn negative_label(self) -> Option<&'static str> {
        match self {
            HumanFactor::Age => None,
            HumanFactor::Gender => Some("male"),
            HumanFactor::PoliticalIdeology => Some("liberal"),
            HumanFactor::Race => Some("white"),
            HumanFactor::SubstanceUse => Some("no_substances"),
        }
    }

    pub fn label(self, value: u32) -> Option<&'static str> {
        match value {
            1 => self.positive_label(),
            0 => self.negative_label(),
            _ => None,
        }
    }

    /// Binary encoding of a label, case-insensitive.
    pub fn encode(self, label: &str) -> Option<u32> {
        let label = label.trim().to_ascii_lowercase();
        if self.positive_label() == Some(label.as_str()) {
            Some(1)
        } else if self.negative_label() == Some(label.as_str()) {
            Some(0)
        } else {
            None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HumanFactor::Age => "age",
            HumanFactor::Gender => "gender",
            HumanFactor::PoliticalIdeology => "political_ideology",
            HumanFactor::Race => "race",
            HumanFactor::SubstanceUse => "substance_use",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            HumanFactor::Age => "Age",
            HumanFactor::Gender => "Gender",
            HumanFactor::PoliticalIdeology => "Political Ideology",
            HumanFactor::Race => "Race",
            HumanFactor::SubstanceUse => "Substance Use",
        }
    }

    pub fn abbreviation(self) -> &'static str {
        match self {
            HumanFactor::Age => "A",
            HumanFactor::Gender => "G",
            HumanFactor::PoliticalIdeology => "P",
            HumanFactor::Race => "R",
            HumanFactor::SubstanceUse => "S",
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for HumanFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HumanFactor {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        match norm.as_str() {
            "age" => Ok(HumanFactor::Age),
            "gender" => Ok(HumanFactor::Gender),
            "political_ideology" | "ideology" => Ok(HumanFactor::PoliticalIdeology),
            "race" => Ok(HumanFactor::Race),
            "substance_use" | "substance" => Ok(HumanFactor::SubstanceUse),
            _ => Err(format!("unknown human factor `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum PersonaMode {
    Explicit,
    Implicit,
}

impl PersonaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PersonaMode::Explicit => "explicit",
            PersonaMode::Implicit => "implicit",
        }
    }
}

impl fmt::Display for PersonaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PersonaMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "explicit" => Ok(PersonaMode::Explicit),
            "implicit" => Ok(PersonaMode::Implicit),
            _ => Err(format!("unknown persona mode `{s}`")),
        }
    }
}

/// Declarative distribution over the human factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct PopulationSpec {
    pub size: usize,
    /// Fraction of the population carrying each binary factor's positive label.
    pub binary_proportions: BTreeMap<HumanFactor, f64>,
    pub age_mean: f64,
    pub age_sd: f64,
    pub age_clamp: (u32, u32),
    pub seed: u64,
}

impl Default for PopulationSpec {
    fn default() -> Self {
        let binary_proportions = BTreeMap::from([
            (HumanFactor::Gender, 0.54),
            (HumanFactor::Race, 0.13),
            (HumanFactor::PoliticalIdeology, 0.29),
            (HumanFactor::SubstanceUse, 0.374),
        ]);
        PopulationSpec {
            size: 641,
            binary_proportions,
            age_mean: 39.3,
            age_sd: 10.1,
            age_clamp: (18, 80),
            seed: 0,
        }
    }
}

impl PopulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(PersonaError::EmptyPopulation);
        }
        for (&factor, &value) in &self.binary_proportions {
            if !factor.is_binary() {
                return Err(PersonaError::NotBinary(factor));
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(PersonaError::InvalidProportion { factor, value });
            }
        }
        if !self.age_mean.is_finite() {
            return Err(PersonaError::InvalidAgeMean(self.age_mean));
        }
        if !(self.age_sd.is_finite() && self.age_sd > 0.0) {
            return Err(PersonaError::InvalidAgeSd(self.age_sd));
        }
        if self.age_clamp.0 > self.age_clamp.1 {
            return Err(PersonaError::InvalidAgeClamp(self.age_clamp.0, self.age_clamp.1));
        }
        Ok(())
    }

    /// Factors every persona of this population carries.
    pub fn factors(&self) -> Vec<HumanFactor> {
        let mut out = vec![HumanFactor::Age];
        out.extend(self.binary_proportions.keys().copied());
        out
    }

    /// Exact positive-label count for a binary factor.
    pub fn positive_count(&self, factor: HumanFactor) -> Option<usize> {
        let p = *self.binary_proportions.get(&factor)?;
        let labels = [factor.positive_label()?, factor.negative_label()?];
        Some(largest_remainder(&[p, 1.0 - p], &labels, self.size)[0])
    }
}

/// Apportions `total` units among categories by the largest-remainder
/// method. Remainder ties go to the lexicographically smaller label.
pub fn largest_remainder(weights: &[f64], labels: &[&str], total: usize) -> Vec<usize> {
    assert_eq!(weights.len(), labels.len(), "one label per weight");
    let quotas: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then_with(|| labels[a].cmp(labels[b]))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonaName {
    pub first: String,
    pub surname: Option<String>,
    /// Factor the name was chosen to signal.
    pub signal: HumanFactor,
}

impl PersonaName {
    pub fn full(&self) -> String {
        match &self.surname {
            Some(s) => format!("{} {}", self.first, s),
            None => self.first.clone(),
        }
    }
}

/// One synthetic worker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Persona {
    pub id: u64,
    /// Years for age, 1/0 for binary factors.
    pub factors: BTreeMap<HumanFactor, u32>,
    #[serde(default)]
    pub name: Option<PersonaName>,
}

impl Persona {
    pub fn value(&self, factor: HumanFactor) -> Option<u32> {
        self.factors.get(&factor).copied()
    }

    pub fn supports(&self, mode: PersonaMode) -> bool {
        match mode {
            PersonaMode::Explicit => true,
            PersonaMode::Implicit => self.name.as_ref().is_some_and(|n| !n.first.is_empty()),
        }
    }
}

/// Personas ordered by id.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PersonaSet {
    personas: Vec<Persona>,
}

impl PersonaSet {
    pub fn new(mut personas: Vec<Persona>) -> Self {
        personas.sort_by_key(|p| p.id);
        PersonaSet { personas }
    }

    pub fn len(&self) -> usize {
        self.personas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.personas.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Persona> {
        self.personas.iter()
    }

    pub fn as_slice(&self) -> &[Persona] {
        &self.personas
    }

    pub fn get(&self, id: u64) -> Option<&Persona> {
        self.personas
            .binary_search_by_key(&id, |p| p.id)
            .ok()
            .map(|i| &self.personas[i])
    }

    /// Number of personas carrying `value` for `factor`.
    pub fn count(&self, factor: HumanFactor, value: u32) -> usize {
        self.personas
            .iter()
            .filter(|p| p.value(factor) == Some(value))
            .count()
    }

    pub fn filter(&self, mut keep: impl FnMut(&Persona) -> bool) -> PersonaSet {
        PersonaSet {
            personas: self.personas.iter().filter(|p| keep(p)).cloned().collect(),
        }
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for p in &self.personas {
            serde_json::to_writer(&mut out, p).map_err(|source| PersonaError::Json {
                line: p.id as usize + 1,
                source,
            })?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut personas = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let p: Persona = serde_json::from_str(&line)
                .map_err(|source| PersonaError::Json { line: i + 1, source })?;
            personas.push(p);
        }
        Ok(PersonaSet::new(personas))
    }
}

impl<'a> IntoIterator for &'a PersonaSet {
    type Item = &'a Persona;
    type IntoIter = std::slice::Iter<'a, Persona>;

    fn into_iter(self) -> Self::IntoIter {
        self.personas.iter()
    }
}

/// Draws a population matching `spec` exactly in its binary counts.
///
/// Each binary factor gets its own seeded shuffle of a label vector with
/// the apportioned counts; ages come from a normal draw, rounded to whole
/// years and clamped. Identical `(spec, seed)` always yields the same set.
pub fn sample_population(spec: &PopulationSpec, seed: u64) -> Result<PersonaSet> {
    spec.validate()?;
    let n = spec.size;
    let mut columns: BTreeMap<HumanFactor, Vec<u32>> = BTreeMap::new();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(HumanFactor::Age.stream());
    let normal = Normal::new(spec.age_mean, spec.age_sd).expect("validated sd");
    let (lo, hi) = spec.age_clamp;
    let ages = (0..n)
        .map(|_| {
            let years = normal.sample(&mut rng).round();
            years.clamp(lo as f64, hi as f64) as u32
        })
        .collect();
    columns.insert(HumanFactor::Age, ages);

    for &factor in spec.binary_proportions.keys() {
        let positives = spec.positive_count(factor).expect("binary factor");
        let mut labels: Vec<u32> = (0..n).map(|i| u32::from(i < positives)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(factor.stream());
        labels.shuffle(&mut rng);
        columns.insert(factor, labels);
    }

    let personas = (0..n)
        .map(|i| Persona {
            id: i as u64,
            factors: columns.iter().map(|(&f, col)| (f, col[i])).collect(),
            name: None,
        })
        .collect();
    Ok(PersonaSet::new(personas))
}
