use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{read_tagged, write_tagged, Corpus, ProbeError, Prober, Request, Result, TaskContext, TaskKind, ValidationQuestion, MAX_PARSE_ATTEMPTS};
use crate::persona::{HumanFactor, PersonaMode};
use crate::task::Domain;

fn is_numeric_char(c: char) -> bool {
    c.is_ascii_digit() || matches!(c, '.' | ',' | '-' | '\u{2212}')
}

/// First standalone -1, 0 or 1 in the text, reading left to right.
///
/// Numbers are read as maximal runs of digits, signs and separators, so
/// "10", "0.5" and "1-2" never count. A trailing period or comma is
/// treated as punctuation.
pub fn parse_judgment(text: &str) -> Option<i8> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if !is_numeric_char(chars[i]) {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && is_numeric_char(chars[i]) {
            i += 1;
        }
        let glued = |k: Option<&char>| k.is_some_and(|c| c.is_alphanumeric());
        if glued(start.checked_sub(1).and_then(|k| chars.get(k))) || glued(chars.get(i)) {
            continue;
        }
        let run: String = chars[start..i].iter().collect();
        match run.trim_end_matches(['.', ',']) {
            "-1" | "\u{2212}1" => return Some(-1),
            "0" => return Some(0),
            "1" => return Some(1),
            _ => {}
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationMeta {
    pub question: String,
    pub domain: Domain,
    /// Mode and factors of the judged corpus.
    pub mode: PersonaMode,
    pub factors: Vec<HumanFactor>,
    pub judge: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub persona_id: u64,
    pub score: Option<i8>,
}

/// Judge scores for the documents of one corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationScores {
    pub meta: ValidationMeta,
    pub scores: Vec<ScoreRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Meta(ValidationMeta),
    Score(ScoreRecord),
}

impl ValidationScores {
    pub fn missing(&self) -> usize {
        self.scores.iter().filter(|s| s.score.is_none()).count()
    }

    /// (persona id, score) for scored documents.
    pub fn present(&self) -> Vec<(u64, i8)> {
        self.scores.iter().filter_map(|s| s.score.map(|v| (s.persona_id, v))).collect()
    }

    pub fn write_jsonl<W: Write>(&self, out: W) -> Result<()> {
        let lines = std::iter::once(Line::Meta(self.meta.clone())).chain(self.scores.iter().cloned().map(Line::Score));
        write_tagged(out, lines)
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut meta = None;
        let mut scores = Vec::new();
        for (line_no, line) in read_tagged::<Line, _>(input)? {
            match line {
                Line::Meta(m) if meta.is_none() => meta = Some(m),
                Line::Meta(_) => return Err(ProbeError::Data(format!("line {line_no}: duplicate meta line"))),
                Line::Score(s) => scores.push(s),
            }
        }
        let meta = meta.ok_or_else(|| ProbeError::Data("score file has no meta line".into()))?;
        Ok(ValidationScores { meta, scores })
    }
}

/// Asks the judge to place every document on the question's -1/0/1 scale.
pub fn run_validation(judge: &Prober, corpus: &Corpus, question: &ValidationQuestion) -> Result<ValidationScores> {
    let task = TaskContext { kind: TaskKind::Validation { domain: question.domain }, mode: corpus.meta.mode, factors: Vec::new() };
    let scores = judge.map_items(&corpus.records, |record| {
        let Some(document) = record.response.as_deref() else {
            return Ok(ScoreRecord { persona_id: record.persona_id, score: None });
        };
        let prompt = question.prompt_for(document);
        let mut score = None;
        for attempt in 0..MAX_PARSE_ATTEMPTS {
            let req = Request { prompt: &prompt, persona: None, task: &task, subject: Some(document), seed: judge.seed(), attempt };
            score = parse_judgment(&judge.complete(&req)?.text);
            if score.is_some() {
                break;
            }
        }
        Ok(ScoreRecord { persona_id: record.persona_id, score })
    })?;
    Ok(ValidationScores {
        meta: ValidationMeta {
            question: question.id.clone(),
            domain: question.domain,
            mode: corpus.meta.mode,
            factors: corpus.meta.factors.clone(),
            judge: judge.fingerprint().to_string(),
            seed: judge.seed(),
        },
        scores,
    })
}
