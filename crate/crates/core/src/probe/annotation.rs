use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{
    compose, persona_prompt, read_tagged, write_tagged, ProbeError, Prober, Request, Result, TaskContext, TaskKind,
    Vignette, MAX_MISSING_FRACTION, MAX_PARSE_ATTEMPTS,
};
use crate::persona::{HumanFactor, PersonaMode, PersonaSet};
use crate::task::Construct;

/// 1 for a leading "yes", 0 for a leading "no", ignoring case and any
/// opening quotes or markup.
pub fn parse_yes_no(text: &str) -> Option<u8> {
    let start = text.trim_start_matches(|c: char| !c.is_alphanumeric());
    let word: String = start.chars().take_while(|c| c.is_alphanumeric()).collect::<String>().to_lowercase();
    match word.as_str() {
        "yes" => Some(1),
        "no" => Some(0),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationMeta {
    pub vignette: String,
    pub construct: Construct,
    pub mode: PersonaMode,
    pub factors: Vec<HumanFactor>,
    pub backend: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRow {
    pub persona_id: u64,
    /// One entry per post; `None` when no reply could be parsed.
    pub labels: Vec<Option<u8>>,
}

/// Persona x post matrix of binary judgments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationTable {
    pub meta: AnnotationMeta,
    pub rows: Vec<AnnotationRow>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Meta(AnnotationMeta),
    Row(AnnotationRow),
}

impl AnnotationTable {
    pub fn total(&self) -> usize {
        self.rows.iter().map(|r| r.labels.len()).sum()
    }

    pub fn missing(&self) -> usize {
        self.rows.iter().flat_map(|r| &r.labels).filter(|l| l.is_none()).count()
    }

    /// Share of posts labelled 1 per persona, over the posts that were
    /// answered; `None` if none were.
    pub fn persona_means(&self) -> Vec<(u64, Option<f64>)> {
        self.rows
            .iter()
            .map(|r| {
                let answered: Vec<f64> = r.labels.iter().flatten().map(|&l| l as f64).collect();
                let mean = (!answered.is_empty()).then(|| answered.iter().sum::<f64>() / answered.len() as f64);
                (r.persona_id, mean)
            })
            .collect()
    }

    pub fn ratings(&self) -> Vec<Vec<Option<u8>>> {
        self.rows.iter().map(|r| r.labels.clone()).collect()
    }

    /// Keeps only rows whose persona satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(u64) -> bool) -> AnnotationTable {
        AnnotationTable {
            meta: self.meta.clone(),
            rows: self.rows.iter().filter(|r| keep(r.persona_id)).cloned().collect(),
        }
    }

    pub fn write_jsonl<W: Write>(&self, out: W) -> Result<()> {
        let lines = std::iter::once(Line::Meta(self.meta.clone())).chain(self.rows.iter().cloned().map(Line::Row));
        write_tagged(out, lines)
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut meta = None;
        let mut rows = Vec::new();
        for (line_no, line) in read_tagged::<Line, _>(input)? {
            match line {
                Line::Meta(m) if meta.is_none() => meta = Some(m),
                Line::Meta(_) => return Err(ProbeError::Data(format!("line {line_no}: duplicate meta line"))),
                Line::Row(r) => {
                    if r.labels.iter().flatten().any(|&l| l > 1) {
                        return Err(ProbeError::Data(format!("line {line_no}: labels must be 0 or 1")));
                    }
                    rows.push(r)
                }
            }
        }
        let meta = meta.ok_or_else(|| ProbeError::Data("annotation table has no meta line".into()))?;
        Ok(AnnotationTable { meta, rows })
    }
}

pub(crate) fn check_missing(missing: usize, total: usize) -> Result<()> {
    if total > 0 && missing as f64 > MAX_MISSING_FRACTION * total as f64 {
        return Err(ProbeError::TooManyMissing { missing, total, limit: MAX_MISSING_FRACTION * 100.0 });
    }
    Ok(())
}

/// Asks every persona to rate every post of the vignette.
///
/// Replies that are neither yes nor no are re-asked up to three attempts in
/// total, then recorded as missing. More than 10% missing aborts the run.
pub fn run_annotation(
    prober: &Prober,
    personas: &PersonaSet,
    vignette: &Vignette,
    mode: PersonaMode,
    factors: &[HumanFactor],
    preamble: &str,
) -> Result<AnnotationTable> {
    vignette.validate()?;
    let rows = prober.map_personas(personas.as_slice(), |persona| {
        let persona_part = persona_prompt(persona, mode, factors, preamble)?;
        let mut labels = Vec::with_capacity(vignette.posts.len());
        for post in 0..vignette.posts.len() {
            let task = TaskContext {
                kind: TaskKind::Annotation { construct: vignette.construct, post },
                mode,
                factors: factors.to_vec(),
            };
            let prompt = compose(&persona_part, &vignette.question_for(post));
            let mut label = None;
            for attempt in 0..MAX_PARSE_ATTEMPTS {
                let req = Request { prompt: &prompt, persona: Some(persona), task: &task, subject: None, seed: prober.seed(), attempt };
                let reply = prober.complete(&req)?;
                label = parse_yes_no(&reply.text);
                if label.is_some() {
                    break;
                }
                log::debug!("persona {} post {post}: unparseable reply {:?}", persona.id, reply.text);
            }
            labels.push(label);
        }
        Ok(AnnotationRow { persona_id: persona.id, labels })
    })?;
    let table = AnnotationTable {
        meta: AnnotationMeta {
            vignette: vignette.id.clone(),
            construct: vignette.construct,
            mode,
            factors: factors.to_vec(),
            backend: prober.fingerprint().to_string(),
            seed: prober.seed(),
        },
        rows,
    };
    check_missing(table.missing(), table.total())?;
    Ok(table)
}
