use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Backend, ProbeError, Request, Result, TaskKind};
use crate::features::tokenize;
use crate::persona::{HumanFactor, Persona, PersonaMode};
use crate::task::{Construct, Domain};

const AGE_RANGE: (f64, f64) = (18.0, 80.0);
const REFUSAL: &str = "I would rather not say.";

/// A token whose per-document inclusion probability depends on a factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TokenBias {
    pub token: String,
    pub factor: HumanFactor,
    /// Domains where the bias applies; empty means all.
    #[serde(default)]
    pub domains: Vec<Domain>,
    /// Inclusion probability at the negative level (male, liberal, white,
    /// non-user, age 18).
    pub negative_probability: f64,
    /// Inclusion probability at the positive level (female, conservative,
    /// Black, user, age 80).
    pub positive_probability: f64,
}

/// Adds `slope * (2 * level - 1)` to the logit of answering "yes".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RatingLink {
    pub construct: Construct,
    pub factor: HumanFactor,
    pub slope: f64,
}

/// Judge rule: documents containing `token` lean toward `score`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct StanceRule {
    pub token: String,
    pub score: i8,
}

/// Seeded stand-in for a language model with known factor effects.
///
/// Generated documents are Zipf draws from `base_vocabulary` with biased
/// tokens inserted. A factor only influences output when the prompt exposes
/// it: explicit personas expose their stated factors fully, implicit
/// personas expose their name's factor scaled by `implicit_signal`, and
/// anything unexposed sits at the midpoint level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticModel {
    pub seed: u64,
    pub base_vocabulary: Vec<String>,
    pub zipf_exponent: f64,
    /// Base tokens per generated document.
    pub document_length: usize,
    pub token_biases: Vec<TokenBias>,
    /// 0 makes names carry no information, 1 makes them as strong as
    /// explicit statements.
    pub implicit_signal: f64,
    pub rating_intercept: f64,
    pub rating_links: Vec<RatingLink>,
    pub stance_rules: Vec<StanceRule>,
    /// Share of rating/judge replies that cannot be parsed.
    pub unparseable_rate: f64,
}

impl Default for SyntheticModel {
    fn default() -> Self {
        SyntheticModel {
            seed: 0,
            base_vocabulary: include_str!("../../data/base_vocabulary.txt")
                .split_whitespace()
                .map(str::to_string)
                .collect(),
            zipf_exponent: 1.0,
            document_length: 40,
            token_biases: Vec::new(),
            implicit_signal: 0.0,
            rating_intercept: 0.0,
            rating_links: Vec::new(),
            stance_rules: Vec::new(),
            unparseable_rate: 0.0,
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ProbeError::Synthetic(format!("{name} must lie in [0, 1], got {p}")))
    }
}

impl SyntheticModel {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_bias(mut self, token: &str, factor: HumanFactor, negative: f64, positive: f64) -> Self {
        self.token_biases.push(TokenBias {
            token: token.to_string(),
            factor,
            domains: Vec::new(),
            negative_probability: negative,
            positive_probability: positive,
        });
        self
    }

    pub fn with_rating_link(mut self, construct: Construct, factor: HumanFactor, slope: f64) -> Self {
        self.rating_links.push(RatingLink { construct, factor, slope });
        self
    }

    pub fn with_stance(mut self, token: &str, score: i8) -> Self {
        self.stance_rules.push(StanceRule { token: token.to_string(), score });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_vocabulary.is_empty() || self.base_vocabulary.iter().any(|t| t.trim().is_empty()) {
            return Err(ProbeError::Synthetic("empty vocabulary".into()));
        }
        if self.document_length == 0 {
            return Err(ProbeError::Synthetic("document_length must be at least 1".into()));
        }
        if !(self.zipf_exponent >= 0.0 && self.zipf_exponent.is_finite()) {
            return Err(ProbeError::Synthetic("zipf_exponent must be >= 0".into()));
        }
        check_probability("implicit_signal", self.implicit_signal)?;
        check_probability("unparseable_rate", self.unparseable_rate)?;
        for b in &self.token_biases {
            check_probability("negative_probability", b.negative_probability)?;
            check_probability("positive_probability", b.positive_probability)?;
            if b.token.trim().is_empty() {
                return Err(ProbeError::Synthetic("biased token is empty".into()));
            }
        }
        if let Some(rule) = self.stance_rules.iter().find(|r| !(-1..=1).contains(&r.score)) {
            return Err(ProbeError::Synthetic(format!("stance score for `{}` must be -1, 0 or 1", rule.token)));
        }
        if !self.rating_intercept.is_finite() || self.rating_links.iter().any(|l| !l.slope.is_finite()) {
            return Err(ProbeError::Synthetic("rating coefficients must be finite".into()));
        }
        Ok(())
    }

    /// Level of `factor` in [0, 1] as perceived through the prompt.
    pub fn exposed_level(&self, persona: &Persona, factor: HumanFactor, mode: PersonaMode, shown: &[HumanFactor]) -> f64 {
        let Some(value) = persona.value(factor) else { return 0.5 };
        let raw = match factor {
            HumanFactor::Age => ((value as f64 - AGE_RANGE.0) / (AGE_RANGE.1 - AGE_RANGE.0)).clamp(0.0, 1.0),
            _ => value.min(1) as f64,
        };
        match mode {
            PersonaMode::Explicit if shown.contains(&factor) => raw,
            PersonaMode::Implicit if persona.name.as_ref().is_some_and(|n| n.signal == factor) => {
                0.5 + self.implicit_signal * (raw - 0.5)
            }
            _ => 0.5,
        }
    }

    fn rng(&self, req: &Request<'_>) -> ChaCha8Rng {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(req.seed.to_le_bytes());
        h.update(req.persona.map_or(u64::MAX, |p| p.id).to_le_bytes());
        h.update(req.task.key().as_bytes());
        h.update(req.attempt.to_le_bytes());
        if let Some(subject) = req.subject {
            h.update(subject.as_bytes());
        }
        ChaCha8Rng::from_seed(h.finalize().into())
    }

    fn generate(&self, req: &Request<'_>, domain: Domain, rng: &mut ChaCha8Rng) -> String {
        let zipf = Zipf::new(self.base_vocabulary.len() as f64, self.zipf_exponent).expect("validated");
        let mut tokens: Vec<&str> = (0..self.document_length)
            .map(|_| {
                let rank = zipf.sample(rng) as usize;
                self.base_vocabulary[rank.clamp(1, self.base_vocabulary.len()) - 1].as_str()
            })
            .collect();
        for bias in &self.token_biases {
            if !bias.domains.is_empty() && !bias.domains.contains(&domain) {
                continue;
            }
            let level = req.persona.map_or(0.5, |p| self.exposed_level(p, bias.factor, req.task.mode, &req.task.factors));
            let p = bias.negative_probability + (bias.positive_probability - bias.negative_probability) * level;
            if rng.random::<f64>() < p {
                let at = rng.random_range(0..=tokens.len());
                tokens.insert(at, bias.token.as_str());
            }
        }
        tokens.join(" ")
    }

    fn rate(&self, req: &Request<'_>, construct: Construct, rng: &mut ChaCha8Rng) -> &'static str {
        let logit = self.rating_intercept
            + self
                .rating_links
                .iter()
                .filter(|l| l.construct == construct)
                .map(|l| {
                    let level = req.persona.map_or(0.5, |p| self.exposed_level(p, l.factor, req.task.mode, &req.task.factors));
                    l.slope * (2.0 * level - 1.0)
                })
                .sum::<f64>();
        let p = 1.0 / (1.0 + (-logit).exp());
        if rng.random::<f64>() < p {
            "Yes."
        } else {
            "No."
        }
    }

    fn judge(&self, subject: &str) -> String {
        let score: i32 = tokenize(subject)
            .iter()
            .map(|t| self.stance_rules.iter().filter(|r| &r.token == t).map(|r| r.score as i32).sum::<i32>())
            .sum();
        format!("Answer: {}", score.signum())
    }
}

impl Backend for SyntheticModel {
    fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("model serializes");
        let digest = Sha256::digest(json.as_bytes());
        format!("synthetic:{}", &hex::encode(digest)[..16])
    }

    fn complete(&self, req: &Request<'_>) -> Result<String> {
        self.validate()?;
        let mut rng = self.rng(req);
        let scored = !matches!(req.task.kind, TaskKind::Generation { .. });
        if scored && self.unparseable_rate > 0.0 && rng.random::<f64>() < self.unparseable_rate {
            return Ok(REFUSAL.to_string());
        }
        Ok(match req.task.kind {
            TaskKind::Generation { domain } => self.generate(req, domain, &mut rng),
            TaskKind::Annotation { construct, .. } => self.rate(req, construct, &mut rng).to_string(),
            TaskKind::Validation { .. } => self.judge(req.subject.unwrap_or(req.prompt)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::TaskContext;
    use std::collections::BTreeMap;

    fn persona(id: u64, female: u32) -> Persona {
        Persona { id, factors: BTreeMap::from([(HumanFactor::Gender, female), (HumanFactor::Age, 30)]), name: None }
    }

    fn generation(factors: Vec<HumanFactor>) -> TaskContext {
        TaskContext { kind: TaskKind::Generation { domain: Domain::Parenting }, mode: PersonaMode::Explicit, factors }
    }

    fn request<'a>(p: &'a Persona, task: &'a TaskContext) -> Request<'a> {
        Request { prompt: "q", persona: Some(p), task, subject: None, seed: 1, attempt: 0 }
    }

    #[test]
    fn deterministic() {
        let model = SyntheticModel::default().with_bias("caregivers", HumanFactor::Gender, 0.2, 0.6);
        let task = generation(vec![HumanFactor::Gender]);
        let p = persona(4, 1);
        let a = model.complete(&request(&p, &task)).unwrap();
        let b = model.complete(&request(&p, &task)).unwrap();
        assert_eq!(a, b);
        assert!(a.split(' ').count() >= 40);
    }

    #[test]
    fn bias_raises_rate_for_positive_group() {
        let model = SyntheticModel::default().with_bias("caregivers", HumanFactor::Gender, 0.2, 0.6);
        let task = generation(vec![HumanFactor::Gender]);
        let rate = |female| {
            (0..400)
                .filter(|&i| {
                    let p = persona(i, female);
                    model.complete(&request(&p, &task)).unwrap().split(' ').any(|t| t == "caregivers")
                })
                .count() as f64
                / 400.0
        };
        let (f, m) = (rate(1), rate(0));
        assert!((f - 0.6).abs() < 0.08, "{f}");
        assert!((m - 0.2).abs() < 0.08, "{m}");
    }

    #[test]
    fn unexposed_factor_sits_at_midpoint() {
        let model = SyntheticModel::default();
        let p = persona(0, 1);
        assert_eq!(model.exposed_level(&p, HumanFactor::Gender, PersonaMode::Explicit, &[HumanFactor::Age]), 0.5);
        assert_eq!(model.exposed_level(&p, HumanFactor::Gender, PersonaMode::Explicit, &[HumanFactor::Gender]), 1.0);
        let age = model.exposed_level(&p, HumanFactor::Age, PersonaMode::Explicit, &[HumanFactor::Age]);
        assert!((age - 12.0 / 62.0).abs() < 1e-12);
    }

    #[test]
    fn judge_follows_stance_tokens() {
        let model = SyntheticModel::default().with_stance("israel", 1).with_stance("palestine", -1);
        let task = TaskContext { kind: TaskKind::Validation { domain: Domain::Palestine }, mode: PersonaMode::Explicit, factors: vec![] };
        let req = |s| Request { prompt: "", persona: None, task: &task, subject: Some(s), seed: 0, attempt: 0 };
        assert_eq!(model.complete(&req("my sympathies lie with Israel")).unwrap(), "Answer: 1");
        assert_eq!(model.complete(&req("both sides")).unwrap(), "Answer: 0");
    }

    #[test]
    fn invalid_models() {
        let empty = SyntheticModel { base_vocabulary: vec![], ..Default::default() };
        assert!(matches!(empty.validate(), Err(ProbeError::Synthetic(m)) if m.contains("empty vocabulary")));
        let bad = SyntheticModel::default().with_bias("x", HumanFactor::Race, 0.0, 1.5);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn fingerprint_tracks_parameters() {
        let a = SyntheticModel::default();
        let b = SyntheticModel::default().with_seed(9);
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), SyntheticModel::default().fingerprint());
    }
}
