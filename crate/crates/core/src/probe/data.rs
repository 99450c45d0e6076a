use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{ProbeError, Result};
use crate::persona::HumanFactor;
use crate::task::{Construct, Domain};

pub const POSTS_PER_VIGNETTE: usize = 5;

const POST_SLOT: &str = "{post}";

/// Five posts rated by every persona, plus the rating question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vignette {
    pub id: String,
    pub construct: Construct,
    pub posts: Vec<String>,
    /// Question template; `{post}` is replaced by the post text.
    pub question: String,
}

impl Vignette {
    pub fn validate(&self) -> Result<()> {
        if self.posts.len() != POSTS_PER_VIGNETTE {
            return Err(ProbeError::Data(format!(
                "vignette `{}` has {} posts, expected {POSTS_PER_VIGNETTE}",
                self.id,
                self.posts.len()
            )));
        }
        if !self.question.contains(POST_SLOT) {
            return Err(ProbeError::Data(format!("vignette `{}` question lacks {POST_SLOT}", self.id)));
        }
        Ok(())
    }

    pub fn question_for(&self, post: usize) -> String {
        self.question.replace(POST_SLOT, &self.posts[post])
    }

    pub fn bundled() -> Vec<Vignette> {
        parse_bundled(include_str!("../../data/vignettes.json"))
    }

    pub fn bundled_for(construct: Construct) -> Vignette {
        Self::bundled().into_iter().find(|v| v.construct == construct).expect("bundled construct")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Vec<Vignette>> {
        let all: Vec<Vignette> = load_json(path.as_ref())?;
        for v in &all {
            v.validate()?;
        }
        Ok(all)
    }
}

/// Open-ended belief question for one domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefQuestion {
    pub id: String,
    pub domain: Domain,
    pub factor: HumanFactor,
    pub text: String,
}

impl BeliefQuestion {
    pub fn bundled() -> Vec<BeliefQuestion> {
        parse_bundled(include_str!("../../data/questions.json"))
    }

    pub fn bundled_for(domain: Domain) -> BeliefQuestion {
        Self::bundled().into_iter().find(|q| q.domain == domain).expect("bundled domain")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Vec<BeliefQuestion>> {
        load_json(path.as_ref())
    }
}

/// Judge question scored on the -1/0/1 scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationQuestion {
    pub id: String,
    pub domain: Domain,
    pub factor: HumanFactor,
    pub text: String,
}

impl ValidationQuestion {
    pub fn bundled() -> Vec<ValidationQuestion> {
        parse_bundled(include_str!("../../data/validation_questions.json"))
    }

    pub fn bundled_for(domain: Domain) -> ValidationQuestion {
        Self::bundled().into_iter().find(|q| q.domain == domain).expect("bundled domain")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Vec<ValidationQuestion>> {
        load_json(path.as_ref())
    }

    pub fn prompt_for(&self, document: &str) -> String {
        format!("{}\nReply with a single number.\n\nText: \"{document}\"", self.text)
    }
}

fn parse_bundled<T: DeserializeOwned>(text: &str) -> Vec<T> {
    serde_json::from_str(text).expect("bundled data is valid")
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| ProbeError::Data(format!("{}: {e}", path.display())))
}
