//! The JSON run configuration shared by every CLI subcommand.

use std::path::{Path, PathBuf};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::Study;
use crate::features::NgramConfig;
use crate::persona::{HumanFactor, PersonaMode, PopulationSpec, DEFAULT_PREAMBLE};
use crate::probe::BackendConfig;
use crate::report::{LayoutParams, TableFormat};
use crate::stats::MetaOptions;
use crate::task::Domain;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: invalid config at `{at}`: {message}")]
    Schema { path: PathBuf, at: String, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{what} `{path}` does not exist")]
    MissingFile { what: &'static str, path: PathBuf },
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
}

pub type Result<T, E = ConfigError> = std::result::Result<T, E>;

/// Which parts of the design to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSelection {
    pub studies: Vec<Study>,
    pub domains: Vec<Domain>,
    pub factors: Vec<HumanFactor>,
    pub modes: Vec<PersonaMode>,
}

impl Default for TaskSelection {
    fn default() -> Self {
        TaskSelection {
            studies: Study::ALL.to_vec(),
            domains: Domain::ALL.to_vec(),
            factors: HumanFactor::ALL.to_vec(),
            modes: vec![PersonaMode::Explicit, PersonaMode::Implicit],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Response cache plus the persona set, corpora and annotation tables.
    pub cache_dir: PathBuf,
    pub results_dir: PathBuf,
    /// Where `report` writes tables and word clouds.
    pub report_dir: PathBuf,
    /// Persona JSONL to use instead of sampling one.
    pub personas: Option<PathBuf>,
    /// Name table CSV replacing the bundled one.
    pub name_table: Option<PathBuf>,
    /// `category<TAB>term` lexica scored alongside n-grams in BGT1.
    pub lexica: Vec<PathBuf>,
    /// Human annotation tables (JSONL), compared in the reliability study.
    pub human_annotations: Vec<PathBuf>,
    /// Persona JSONL describing the human raters.
    pub human_personas: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            cache_dir: "cache".into(),
            results_dir: "results".into(),
            report_dir: "report".into(),
            personas: None,
            name_table: None,
            lexica: Vec::new(),
            human_annotations: Vec::new(),
            human_personas: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub formats: Vec<TableFormat>,
    /// Terms per word cloud side.
    pub max_terms: usize,
    pub layout: LayoutParams,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { formats: vec![TableFormat::Csv, TableFormat::Markdown], max_terms: 50, layout: LayoutParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// FDR level for every correction.
    pub alpha: f64,
    pub population: PopulationSpec,
    pub backend: BackendConfig,
    /// Model judging stance in the validation study; the main backend when absent.
    pub judge: Option<BackendConfig>,
    /// Text around the persona sentence; `{persona}` marks where it goes.
    pub preamble: String,
    /// Year used to turn ages into birth decades for name choice.
    pub reference_year: i32,
    pub tasks: TaskSelection,
    pub ngrams: NgramConfig,
    pub meta: MetaOptions,
    pub paths: Paths,
    pub report: ReportConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            alpha: 0.05,
            population: PopulationSpec::default(),
            backend: BackendConfig::default(),
            judge: None,
            preamble: DEFAULT_PREAMBLE.to_string(),
            reference_year: 2024,
            tasks: TaskSelection::default(),
            ngrams: NgramConfig::default(),
            meta: MetaOptions::default(),
            paths: Paths::default(),
            report: ReportConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parses JSON, reporting schema violations with their JSON path.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
            path: origin.to_path_buf(),
            at: e.path().to_string(),
            message: e.into_inner().to_string(),
        })
    }

    /// Reads and validates a config file. Relative paths inside it are
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let mut cfg = RunConfig::from_json(&text, path)?;
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let paths = &mut self.paths;
        fix(&mut paths.cache_dir);
        fix(&mut paths.results_dir);
        fix(&mut paths.report_dir);
        paths.personas.iter_mut().for_each(fix);
        paths.name_table.iter_mut().for_each(fix);
        paths.lexica.iter_mut().for_each(fix);
        paths.human_annotations.iter_mut().for_each(fix);
        paths.human_personas.iter_mut().for_each(fix);
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError::Invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        self.population.validate().map_err(|e| ConfigError::Invalid(format!("population: {e}")))?;
        self.backend.validate().map_err(|e| ConfigError::Invalid(format!("backend: {e}")))?;
        if let Some(judge) = &self.judge {
            judge.validate().map_err(|e| ConfigError::Invalid(format!("judge: {e}")))?;
        }
        if !self.preamble.contains("{persona}") {
            return Err(ConfigError::Invalid("preamble must contain `{persona}`".into()));
        }
        if self.meta.min_aligned < 3 {
            return Err(ConfigError::Invalid("meta.min_aligned must be at least 3".into()));
        }
        if self.ngrams.orders.is_empty() || self.ngrams.orders.contains(&0) {
            return Err(ConfigError::Invalid("ngrams.orders must be non-empty and positive".into()));
        }
        let t = &self.tasks;
        if t.studies.is_empty() || t.domains.is_empty() || t.factors.is_empty() || t.modes.is_empty() {
            return Err(ConfigError::Invalid("tasks must select at least one study, domain, factor and mode".into()));
        }
        let p = &self.paths;
        let exists = |what: &'static str, path: &PathBuf| if path.exists() { Ok(()) } else { Err(ConfigError::MissingFile { what, path: path.clone() }) };
        p.personas.iter().try_for_each(|x| exists("persona file", x))?;
        p.name_table.iter().try_for_each(|x| exists("name table", x))?;
        p.lexica.iter().try_for_each(|x| exists("lexicon", x))?;
        p.human_annotations.iter().try_for_each(|x| exists("human annotation file", x))?;
        p.human_personas.iter().try_for_each(|x| exists("human persona file", x))?;
        if !p.human_annotations.is_empty() && p.human_personas.is_none() {
            return Err(ConfigError::Invalid("human_annotations needs human_personas".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form (object keys sorted).
    pub fn fingerprint(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }

    pub fn schema() -> schemars::Schema {
        schemars::schema_for!(RunConfig)
    }

    pub fn judge_config(&self) -> &BackendConfig {
        self.judge.as_ref().unwrap_or(&self.backend)
    }
}
