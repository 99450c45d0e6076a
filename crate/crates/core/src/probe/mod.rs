//! Driving a text-generation backend through the annotation, belief
//! generation and judge-validation tasks.
//!
//! A [`Prober`] wraps any [`Backend`] with a response cache, retry policy and
//! a bounded worker pool. Two backends ship with the crate: an
//! OpenAI-compatible HTTP client and a seeded [`SyntheticModel`] for offline
//! runs with a known ground truth.

mod annotation;
mod cache;
mod data;
mod generation;
mod http;
mod prober;
mod synthetic;
mod validation;

pub use annotation::{parse_yes_no, run_annotation, AnnotationMeta, AnnotationRow, AnnotationTable};
pub use cache::{CacheEntry, CacheStats, ResponseCache};
pub use data::{BeliefQuestion, ValidationQuestion, Vignette, POSTS_PER_VIGNETTE};
pub use generation::{run_generation, Corpus, CorpusMeta, GenerationRecord};
pub use http::{ChatChoice, ChatChoiceMessage, ChatMessage, ChatRequest, ChatResponse, HttpChatBackend};
pub use prober::{Completion, Prober};
pub use synthetic::{RatingLink, StanceRule, SyntheticModel, TokenBias};
pub use validation::{parse_judgment, run_validation, ScoreRecord, ValidationMeta, ValidationScores};

use std::io::{BufRead, BufWriter, Write};
use std::path::PathBuf;

use schemars::JsonSchema;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::persona::{HumanFactor, Persona, PersonaError, PersonaMode};
use crate::task::{Construct, Domain};

/// Attempts per judgment before it is recorded as missing.
pub const MAX_PARSE_ATTEMPTS: u32 = 3;
/// Largest tolerated share of missing judgments in one run.
pub const MAX_MISSING_FRACTION: f64 = 0.10;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("auth token variable `{0}` is not set")]
    MissingToken(String),
    #[error("backend rejected credentials (HTTP {status}); check `{env_var}`")]
    Unauthorized { status: u16, env_var: String },
    #[error("backend returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("backend returned an empty response")]
    EmptyResponse,
    #[error("malformed backend response: {0}")]
    Malformed(String),
    #[error("{0}")]
    Config(String),
    #[error("synthetic model: {0}")]
    Synthetic(String),
    #[error("{missing} of {total} judgments missing (limit {limit:.0}%)")]
    TooManyMissing { missing: usize, total: usize, limit: f64 },
    #[error("persona {0} cannot be rendered in implicit mode")]
    UnsupportedMode(u64),
    #[error("cache {path}: {message}")]
    Cache { path: PathBuf, message: String },
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Persona(#[from] PersonaError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ProbeError {
    /// Failures worth retrying with backoff.
    pub fn is_transient(&self) -> bool {
        match self {
            ProbeError::Transport(_) | ProbeError::EmptyResponse => true,
            ProbeError::Http { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

pub type Result<T, E = ProbeError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case", tag = "task")]
pub enum TaskKind {
    Annotation { construct: Construct, post: usize },
    Generation { domain: Domain },
    Validation { domain: Domain },
}

/// What a request is for, beyond the raw prompt text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskContext {
    pub kind: TaskKind,
    pub mode: PersonaMode,
    /// Factors stated (explicit) or signalled (implicit) in the prompt.
    pub factors: Vec<HumanFactor>,
}

impl TaskContext {
    /// Stable text key, used to derive synthetic randomness.
    pub fn key(&self) -> String {
        let kind = match self.kind {
            TaskKind::Annotation { construct, post } => format!("annotation:{construct}:{post}"),
            TaskKind::Generation { domain } => format!("generation:{domain}"),
            TaskKind::Validation { domain } => format!("validation:{domain}"),
        };
        let factors: Vec<&str> = self.factors.iter().map(|f| f.as_str()).collect();
        format!("{kind}:{}:{}", self.mode, factors.join("+"))
    }
}

/// One completion request as seen by a backend.
#[derive(Debug, Clone, Copy)]
pub struct Request<'a> {
    pub prompt: &'a str,
    pub persona: Option<&'a Persona>,
    pub task: &'a TaskContext,
    /// Document under judgment, for validation requests.
    pub subject: Option<&'a str>,
    pub seed: u64,
    /// 0 for the first try; bumped when a reply could not be parsed.
    pub attempt: u32,
}

pub trait Backend: Send + Sync {
    /// Identifies the model and decoding parameters; part of every cache key.
    fn fingerprint(&self) -> String;
    fn complete(&self, request: &Request<'_>) -> Result<String>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    HttpChat,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub initial_backoff_ms: u64,
    pub backoff_factor: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_retries: 3, initial_backoff_ms: 500, backoff_factor: 2.0 }
    }
}

impl RetryPolicy {
    pub fn delay(&self, retry: u32) -> std::time::Duration {
        let ms = self.initial_backoff_ms as f64 * self.backoff_factor.powi(retry as i32);
        std::time::Duration::from_millis(ms.min(60_000.0) as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the bearer token.
    pub token_env: String,
    pub temperature: f64,
    pub max_tokens: Option<u32>,
    pub timeout_secs: u64,
    pub max_parallel: usize,
    pub retry: RetryPolicy,
    /// Required when `kind` is `synthetic`.
    pub synthetic: Option<SyntheticModel>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendKind::HttpChat,
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4o".into(),
            token_env: "OPENAI_API_KEY".into(),
            temperature: 0.7,
            max_tokens: Some(512),
            timeout_secs: 60,
            max_parallel: 8,
            retry: RetryPolicy::default(),
            synthetic: None,
        }
    }
}

impl BackendConfig {
    pub fn synthetic(model: SyntheticModel) -> Self {
        BackendConfig { kind: BackendKind::Synthetic, synthetic: Some(model), ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_parallel == 0 {
            return Err(ProbeError::Config("max_parallel must be at least 1".into()));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(ProbeError::Config(format!("temperature must be >= 0, got {}", self.temperature)));
        }
        if self.retry.backoff_factor < 1.0 || !self.retry.backoff_factor.is_finite() {
            return Err(ProbeError::Config("retry.backoff_factor must be >= 1".into()));
        }
        match self.kind {
            BackendKind::HttpChat if self.endpoint.is_empty() || self.model.is_empty() => {
                Err(ProbeError::Config("http_chat backend needs an endpoint and a model".into()))
            }
            BackendKind::Synthetic => match &self.synthetic {
                Some(model) => model.validate(),
                None => Err(ProbeError::Config("synthetic backend needs a `synthetic` model".into())),
            },
            _ => Ok(()),
        }
    }

    /// Builds the configured backend. For HTTP this reads the token variable.
    pub fn build(&self) -> Result<Box<dyn Backend>> {
        self.validate()?;
        Ok(match self.kind {
            BackendKind::HttpChat => Box::new(HttpChatBackend::from_config(self)?),
            BackendKind::Synthetic => Box::new(self.synthetic.clone().expect("validated")),
        })
    }
}

/// Joins the persona sentence and the task text.
pub(crate) fn compose(persona_part: &str, task: &str) -> String {
    if persona_part.is_empty() {
        task.to_string()
    } else {
        format!("{persona_part}\n\n{task}")
    }
}

/// Renders the persona sentence, mapping unsupported modes to a probe error.
pub(crate) fn persona_prompt(
    persona: &Persona,
    mode: PersonaMode,
    factors: &[HumanFactor],
    preamble: &str,
) -> Result<String> {
    if !persona.supports(mode) {
        return Err(ProbeError::UnsupportedMode(persona.id));
    }
    Ok(crate::persona::render_prompt(persona, mode, factors, preamble)?)
}

pub(crate) fn write_tagged<W: Write, T: Serialize>(out: W, lines: impl IntoIterator<Item = T>) -> Result<()> {
    let mut out = BufWriter::new(out);
    for line in lines {
        serde_json::to_writer(&mut out, &line).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Parses non-blank lines, returning each with its 1-based line number.
pub(crate) fn read_tagged<T: DeserializeOwned, R: BufRead>(input: R) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|source| ProbeError::Json { line: i + 1, source })?;
        out.push((i + 1, value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut cfg = BackendConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.max_parallel = 0;
        assert!(cfg.validate().is_err());
        cfg.max_parallel = 1;
        cfg.temperature = -0.1;
        assert!(cfg.validate().is_err());
        let cfg = BackendConfig { kind: BackendKind::Synthetic, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn transient_classification() {
        assert!(ProbeError::Http { status: 429, body: String::new() }.is_transient());
        assert!(ProbeError::Http { status: 503, body: String::new() }.is_transient());
        assert!(!ProbeError::Http { status: 400, body: String::new() }.is_transient());
        assert!(!ProbeError::MissingToken("X".into()).is_transient());
    }

    #[test]
    fn backoff_grows() {
        let p = RetryPolicy { max_retries: 3, initial_backoff_ms: 10, backoff_factor: 2.0 };
        assert_eq!(p.delay(0).as_millis(), 10);
        assert_eq!(p.delay(2).as_millis(), 40);
    }
}
