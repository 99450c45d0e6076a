//! Vocabulary shared by the probing tasks and the studies.

use std::fmt;
use std::str::FromStr;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::persona::HumanFactor;

/// Belief domain, one per human factor.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema,
)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Palestine,
    Parenting,
    Immigration,
    Policing,
    Legalization,
}

impl Domain {
    pub const ALL: [Domain; 5] = [
        Domain::Palestine,
        Domain::Parenting,
        Domain::Immigration,
        Domain::Policing,
        Domain::Legalization,
    ];

    /// The factor whose belief differences the domain question targets.
    pub fn factor(self) -> HumanFactor {
        match self {
            Domain::Palestine => HumanFactor::Age,
            Domain::Parenting => HumanFactor::Gender,
            Domain::Immigration => HumanFactor::PoliticalIdeology,
            Domain::Policing => HumanFactor::Race,
            Domain::Legalization => HumanFactor::SubstanceUse,
        }
    }

    pub fn for_factor(factor: HumanFactor) -> Domain {
        match factor {
            HumanFactor::Age => Domain::Palestine,
            HumanFactor::Gender => Domain::Parenting,
            HumanFactor::PoliticalIdeology => Domain::Immigration,
            HumanFactor::Race => Domain::Policing,
            HumanFactor::SubstanceUse => Domain::Legalization,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Palestine => "palestine",
            Domain::Parenting => "parenting",
            Domain::Immigration => "immigration",
            Domain::Policing => "policing",
            Domain::Legalization => "legalization",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Domain::Palestine => "Palestine",
            Domain::Parenting => "Parenting",
            Domain::Immigration => "Immigration",
            Domain::Policing => "Policing",
            Domain::Legalization => "Legalization",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Domain::ALL
            .into_iter()
            .find(|d| d.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown domain `{s}`"))
    }
}

/// What an annotation vignette asks raters to detect.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema,
)]
#[serde(rename_all = "snake_case")]
pub enum Construct {
    Offensive,
    Stigmatizing,
}

impl Construct {
    pub const ALL: [Construct; 2] = [Construct::Offensive, Construct::Stigmatizing];

    pub fn as_str(self) -> &'static str {
        match self {
            Construct::Offensive => "offensive",
            Construct::Stigmatizing => "stigmatizing",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Construct::Offensive => "Offensive",
            Construct::Stigmatizing => "Stigmatizing",
        }
    }
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Construct {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "offensive" => Ok(Construct::Offensive),
            "stigmatizing" => Ok(Construct::Stigmatizing),
            _ => Err(format!("unknown construct `{s}`")),
        }
    }
}
