use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{HumanFactor, PersonaError, PersonaName, PersonaSet, Result};

const BUNDLED_NAMES: &str = include_str!("../../data/names.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NameSlot {
    First,
    Surname,
}

impl fmt::Display for NameSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NameSlot::First => "first",
            NameSlot::Surname => "surname",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NameLabel {
    /// Binary encoding of the signalled label.
    Binary(u32),
    /// Birth decade, e.g. 1980.
    Decade(i32),
}

impl fmt::Display for NameLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NameLabel::Binary(v) => write!(f, "{v}"),
            NameLabel::Decade(d) => write!(f, "{d}s"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameRow {
    pub name: String,
    pub slot: NameSlot,
    pub signal: HumanFactor,
    pub label: NameLabel,
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    name: String,
    slot: String,
    signal: String,
    label: String,
}

/// Names with the demographic they signal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameTable {
    rows: Vec<NameRow>,
}

impl NameTable {
    /// Validates rows and drops first names that appear under more than
    /// one decade.
    pub fn from_rows(rows: Vec<NameRow>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            let line = i + 2;
            if !row.signal.supports_implicit() {
                return Err(PersonaError::NameTable {
                    line,
                    message: format!("names cannot signal {}", row.signal),
                });
            }
            if row.name.trim().is_empty() {
                return Err(PersonaError::NameTable { line, message: "empty name".into() });
            }
            match (row.signal, row.label) {
                (HumanFactor::Age, NameLabel::Decade(d)) if d % 10 == 0 => {}
                (HumanFactor::Age, _) => {
                    return Err(PersonaError::NameTable {
                        line,
                        message: "age names need a decade label such as 1980".into(),
                    })
                }
                (_, NameLabel::Binary(0 | 1)) => {}
                _ => {
                    return Err(PersonaError::NameTable {
                        line,
                        message: format!("invalid label for {}", row.signal),
                    })
                }
            }
            if row.slot == NameSlot::Surname && row.signal != HumanFactor::Race {
                return Err(PersonaError::NameTable {
                    line,
                    message: "only race rows may carry surnames".into(),
                });
            }
        }

        let mut decades: BTreeMap<&str, BTreeSet<NameLabel>> = BTreeMap::new();
        for row in rows.iter().filter(|r| r.signal == HumanFactor::Age) {
            decades.entry(row.name.as_str()).or_default().insert(row.label);
        }
        let ambiguous: BTreeSet<String> = decades
            .into_iter()
            .filter(|(_, d)| d.len() > 1)
            .map(|(n, _)| n.to_string())
            .collect();
        let mut rows: Vec<NameRow> = rows
            .into_iter()
            .filter(|r| r.signal != HumanFactor::Age || !ambiguous.contains(&r.name))
            .collect();
        rows.dedup();
        Ok(NameTable { rows })
    }

    /// Reads the `name,slot,signal,label` CSV format.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = csv.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["name", "slot", "signal", "label"] {
            return Err(PersonaError::NameTable {
                line: 1,
                message: "expected header `name,slot,signal,label`".into(),
            });
        }
        let mut rows = Vec::new();
        for (i, record) in csv.deserialize::<CsvRow>().enumerate() {
            let line = i + 2;
            let raw = record?;
            let bad = |message: String| PersonaError::NameTable { line, message };
            let slot = match raw.slot.to_ascii_lowercase().as_str() {
                "first" => NameSlot::First,
                "surname" => NameSlot::Surname,
                other => return Err(bad(format!("unknown slot `{other}`"))),
            };
            let signal: HumanFactor = raw.signal.parse().map_err(bad)?;
            let label = if signal == HumanFactor::Age {
                if raw.label.len() != 4 {
                    return Err(bad(format!("decade `{}` is not a 4-digit year", raw.label)));
                }
                NameLabel::Decade(
                    raw.label.parse().map_err(|_| bad(format!("bad decade `{}`", raw.label)))?,
                )
            } else {
                NameLabel::Binary(
                    signal
                        .encode(&raw.label)
                        .ok_or_else(|| bad(format!("unknown {} label `{}`", signal, raw.label)))?,
                )
            };
            rows.push(NameRow { name: raw.name, slot, signal, label });
        }
        Self::from_rows(rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    /// Small illustrative table shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_csv_reader(BUNDLED_NAMES.as_bytes()).expect("bundled name table is valid")
    }

    pub fn rows(&self) -> &[NameRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn candidates(&self, signal: HumanFactor, slot: NameSlot, label: NameLabel) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.signal == signal && r.slot == slot && r.label == label)
            .map(|r| r.name.as_str())
            .collect()
    }
}

/// Birth decade of a persona aged `age` in `reference_year`.
pub fn birth_decade(age: u32, reference_year: i32) -> i32 {
    (reference_year - age as i32).div_euclid(10) * 10
}

/// Gives every persona a name signalling its value of `factor`.
///
/// First names are drawn from rows matching the persona's label (or birth
/// decade for age); race personas also get a race-matched surname.
pub fn assign_names(
    personas: &PersonaSet,
    table: &NameTable,
    factor: HumanFactor,
    reference_year: i32,
    seed: u64,
) -> Result<PersonaSet> {
    if !factor.supports_implicit() {
        return Err(PersonaError::NoNameSignal(factor));
    }
    if !table.rows.iter().any(|r| r.signal == factor) {
        return Err(PersonaError::NoNamesForFactor(factor));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x4e41_4d45 + factor as u64);

    let mut out = Vec::with_capacity(personas.len());
    for persona in personas {
        let value = persona
            .value(factor)
            .ok_or(PersonaError::MissingFactor { persona: persona.id, factor })?;
        let label = match factor {
            HumanFactor::Age => NameLabel::Decade(birth_decade(value, reference_year)),
            _ => NameLabel::Binary(value),
        };
        let pick = |slot: NameSlot, rng: &mut ChaCha8Rng| -> Result<String> {
            table
                .candidates(factor, slot, label)
                .choose(rng)
                .map(|s| s.to_string())
                .ok_or_else(|| PersonaError::NoMatchingNames {
                    persona: persona.id,
                    factor,
                    slot,
                    label: label.to_string(),
                })
        };
        let first = pick(NameSlot::First, &mut rng)?;
        let surname = if factor == HumanFactor::Race {
            Some(pick(NameSlot::Surname, &mut rng)?)
        } else {
            None
        };
        let mut named = persona.clone();
        named.name = Some(PersonaName { first, surname, signal: factor });
        out.push(named);
    }
    Ok(PersonaSet::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persona::{sample_population, PersonaMode, PopulationSpec};

    fn row(name: &str, slot: NameSlot, signal: HumanFactor, label: NameLabel) -> NameRow {
        NameRow { name: name.into(), slot, signal, label }
    }

    #[test]
    fn bundled_table_loads() {
        let table = NameTable::bundled();
        assert!(table.rows().iter().any(|r| r.name == "Jermaine"));
        assert!(table.rows().iter().any(|r| r.name == "Washington"));
        assert!(table.rows().iter().any(|r| r.name == "Mary"));
    }

    #[test]
    fn ambiguous_decade_names_removed() {
        let rows = vec![
            row("Linda", NameSlot::First, HumanFactor::Age, NameLabel::Decade(1940)),
            row("Linda", NameSlot::First, HumanFactor::Age, NameLabel::Decade(1950)),
            row("Gary", NameSlot::First, HumanFactor::Age, NameLabel::Decade(1940)),
        ];
        let table = NameTable::from_rows(rows).unwrap();
        assert_eq!(table.rows().len(), 1);
        assert_eq!(table.rows()[0].name, "Gary");
    }

    #[test]
    fn rejects_signals_without_names() {
        let rows = vec![row("X", NameSlot::First, HumanFactor::PoliticalIdeology, NameLabel::Binary(1))];
        assert!(NameTable::from_rows(rows).is_err());
        let csv = "name,slot,signal,label\nBob,first,age,80s\n";
        assert!(NameTable::from_csv_reader(csv.as_bytes()).is_err());
    }

    #[test]
    fn black_personas_get_black_names() {
        let csv = "name,slot,signal,label\n\
                   Jermaine,first,race,black\nWashington,surname,race,black\n\
                   Connor,first,race,white\nOlson,surname,race,white\n";
        let table = NameTable::from_csv_reader(csv.as_bytes()).unwrap();
        let set = sample_population(&PopulationSpec { size: 50, ..Default::default() }, 3).unwrap();
        let named = assign_names(&set, &table, HumanFactor::Race, 2024, 9).unwrap();
        for p in &named {
            let name = p.name.as_ref().unwrap().full();
            if p.value(HumanFactor::Race) == Some(1) {
                assert_eq!(name, "Jermaine Washington");
            } else {
                assert_eq!(name, "Connor Olson");
            }
            assert!(p.supports(PersonaMode::Implicit));
        }
    }

    #[test]
    fn empty_table_is_an_error() {
        let set = sample_population(&PopulationSpec { size: 5, ..Default::default() }, 0).unwrap();
        let err = assign_names(&set, &NameTable::default(), HumanFactor::Gender, 2024, 0);
        assert!(matches!(err, Err(PersonaError::NoNamesForFactor(HumanFactor::Gender))));
    }

    #[test]
    fn missing_decade_is_an_error() {
        let table = NameTable::from_rows(vec![row(
            "Ethel",
            NameSlot::First,
            HumanFactor::Age,
            NameLabel::Decade(1910),
        )])
        .unwrap();
        let set = sample_population(&PopulationSpec { size: 5, ..Default::default() }, 0).unwrap();
        let err = assign_names(&set, &table, HumanFactor::Age, 2024, 0);
        assert!(matches!(err, Err(PersonaError::NoMatchingNames { .. })));
    }

    #[test]
    fn deterministic_assignment() {
        let table = NameTable::bundled();
        let set = sample_population(&PopulationSpec::default(), 5).unwrap();
        for factor in HumanFactor::IMPLICIT {
            let a = assign_names(&set, &table, factor, 2024, 11).unwrap();
            let b = assign_names(&set, &table, factor, 2024, 11).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn age_names_follow_birth_decade() {
        assert_eq!(birth_decade(65, 2024), 1950);
        assert_eq!(birth_decade(18, 2024), 2000);
        assert_eq!(birth_decade(80, 2024), 1940);
        let table = NameTable::bundled();
        let set = sample_population(&PopulationSpec::default(), 5).unwrap();
        let named = assign_names(&set, &table, HumanFactor::Age, 2024, 1).unwrap();
        for p in &named {
            let decade = birth_decade(p.value(HumanFactor::Age).unwrap(), 2024);
            let first = &p.name.as_ref().unwrap().first;
            assert!(table.rows().iter().any(|r| &r.name == first
                && r.label == NameLabel::Decade(decade)));
        }
    }
}
