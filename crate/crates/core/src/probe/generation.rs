use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::cache::cache_key;
use super::{compose, persona_prompt, read_tagged, write_tagged, BeliefQuestion, ProbeError, Prober, Request, Result, TaskContext, TaskKind};
use crate::persona::{HumanFactor, PersonaMode, PersonaSet};
use crate::task::Domain;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusMeta {
    pub question: String,
    pub domain: Domain,
    pub mode: PersonaMode,
    /// Factors present in the persona prompt.
    pub factors: Vec<HumanFactor>,
    pub backend: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub persona_id: u64,
    pub mode: PersonaMode,
    pub prompt: String,
    /// `None` when the backend kept returning empty text.
    pub response: Option<String>,
    pub backend: String,
    pub timestamp: u64,
    pub cache_key: String,
}

/// Persona-keyed answers to one belief question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub meta: CorpusMeta,
    pub records: Vec<GenerationRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Meta(CorpusMeta),
    Record(GenerationRecord),
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn missing(&self) -> usize {
        self.records.iter().filter(|r| r.response.is_none()).count()
    }

    /// (persona id, text) for every answered record.
    pub fn documents(&self) -> Vec<(u64, &str)> {
        self.records
            .iter()
            .filter_map(|r| r.response.as_deref().map(|t| (r.persona_id, t)))
            .collect()
    }

    pub fn write_jsonl<W: Write>(&self, out: W) -> Result<()> {
        let lines = std::iter::once(Line::Meta(self.meta.clone())).chain(self.records.iter().cloned().map(Line::Record));
        write_tagged(out, lines)
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut meta = None;
        let mut records = Vec::new();
        for (line_no, line) in read_tagged::<Line, _>(input)? {
            match line {
                Line::Meta(m) if meta.is_none() => meta = Some(m),
                Line::Meta(_) => return Err(ProbeError::Data(format!("line {line_no}: duplicate meta line"))),
                Line::Record(r) => records.push(r),
            }
        }
        let meta = meta.ok_or_else(|| ProbeError::Data("corpus has no meta line".into()))?;
        Ok(Corpus { meta, records })
    }
}

/// One answer per persona to the belief question.
pub fn run_generation(
    prober: &Prober,
    personas: &PersonaSet,
    question: &BeliefQuestion,
    mode: PersonaMode,
    factors: &[HumanFactor],
    preamble: &str,
) -> Result<Corpus> {
    let task = TaskContext { kind: TaskKind::Generation { domain: question.domain }, mode, factors: factors.to_vec() };
    let records = prober.map_personas(personas.as_slice(), |persona| {
        let prompt = compose(&persona_prompt(persona, mode, factors, preamble)?, &question.text);
        let req = Request { prompt: &prompt, persona: Some(persona), task: &task, subject: None, seed: prober.seed(), attempt: 0 };
        let (response, timestamp, key) = match prober.complete(&req) {
            Ok(c) => (Some(c.text), c.timestamp, c.cache_key),
            Err(ProbeError::EmptyResponse) => {
                log::warn!("persona {}: empty response recorded as missing", persona.id);
                (None, 0, cache_key(prober.fingerprint(), &prompt, Some(persona.id), prober.seed(), 0))
            }
            Err(e) => return Err(e),
        };
        Ok(GenerationRecord {
            persona_id: persona.id,
            mode,
            prompt,
            response,
            backend: prober.fingerprint().to_string(),
            timestamp,
            cache_key: key,
        })
    })?;
    Ok(Corpus {
        meta: CorpusMeta {
            question: question.id.clone(),
            domain: question.domain,
            mode,
            factors: factors.to_vec(),
            backend: prober.fingerprint().to_string(),
            seed: prober.seed(),
        },
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persona::{sample_population, PopulationSpec, DEFAULT_PREAMBLE};
    use crate::probe::{ResponseCache, RetryPolicy, SyntheticModel};

    fn prober(cache: ResponseCache) -> Prober {
        Prober::new(Box::new(SyntheticModel::default()), cache, RetryPolicy::default(), 4, 11).unwrap()
    }

    #[test]
    fn one_document_per_persona() {
        let personas = sample_population(&PopulationSpec::default(), 0).unwrap();
        let q = BeliefQuestion::bundled_for(Domain::Parenting);
        let corpus = run_generation(&prober(ResponseCache::in_memory()), &personas, &q, PersonaMode::Explicit, &[HumanFactor::Gender], DEFAULT_PREAMBLE).unwrap();
        assert_eq!(corpus.len(), 641);
        assert_eq!(corpus.documents().len(), 641);
        assert!(corpus.records[0].prompt.starts_with("You are "));
        assert!(corpus.records[0].prompt.ends_with(&q.text));
    }

    #[test]
    fn empty_population() {
        let q = BeliefQuestion::bundled_for(Domain::Policing);
        let corpus = run_generation(&prober(ResponseCache::in_memory()), &PersonaSet::default(), &q, PersonaMode::Explicit, &[], "").unwrap();
        assert!(corpus.is_empty());
    }

    #[test]
    fn cached_rerun_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let personas = sample_population(&PopulationSpec { size: 30, ..Default::default() }, 2).unwrap();
        let q = BeliefQuestion::bundled_for(Domain::Immigration);
        let f = [HumanFactor::PoliticalIdeology];
        let first = run_generation(&prober(ResponseCache::open(dir.path()).unwrap()), &personas, &q, PersonaMode::Explicit, &f, "").unwrap();
        let again = prober(ResponseCache::open(dir.path()).unwrap());
        let second = run_generation(&again, &personas, &q, PersonaMode::Explicit, &f, "").unwrap();
        assert_eq!(first, second);
        assert_eq!(again.backend_calls(), 0);
        assert_eq!(again.stats().hits, 30);

        let mut buf = Vec::new();
        first.write_jsonl(&mut buf).unwrap();
        assert_eq!(Corpus::read_jsonl(buf.as_slice()).unwrap(), first);
    }

    #[test]
    fn implicit_without_names_fails() {
        let personas = sample_population(&PopulationSpec { size: 3, ..Default::default() }, 2).unwrap();
        let q = BeliefQuestion::bundled_for(Domain::Parenting);
        let err = run_generation(&prober(ResponseCache::in_memory()), &personas, &q, PersonaMode::Implicit, &[HumanFactor::Gender], "");
        assert!(matches!(err, Err(ProbeError::UnsupportedMode(_))));
    }
}
