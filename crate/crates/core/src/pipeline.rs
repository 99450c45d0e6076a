//! End-to-end orchestration behind the CLI: which probing jobs a study
//! needs, where their outputs live, and how cached outputs become study
//! results and reports.
//!
//! Layout under the cache directory:
//!
//! ```text
//! personas.jsonl
//! cache.jsonl                      backend responses
//! judge/cache.jsonl                judge responses
//! annotations/<construct>_<mode>_<factor>.jsonl
//! corpora/<domain>_<mode>_<factor|full>.jsonl
//! validation/<domain>.jsonl
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::{
    self, annotation_effects, bgt1, bgt1_validation, bgt2, bgt3_grid, corpus_effects, importance_grid,
    reliability_grid, validation_grid, AnalysisError, CrossPair, FeatureSource, RaterSource, Study, StudyResult,
};
use crate::config::{ConfigError, RunConfig};
use crate::features::Lexicon;
use crate::persona::{assign_names, sample_population, HumanFactor, NameTable, PersonaError, PersonaMode, PersonaSet};
use crate::probe::{
    run_annotation, run_generation, run_validation, AnnotationTable, BeliefQuestion, Corpus, ProbeError, Prober,
    ValidationQuestion, ValidationScores, Vignette,
};
use crate::report::{emit_tables, render_svg, wordcloud_data, ReplicationReport, ReportError};
use crate::stats::EffectTable;
use crate::task::{Construct, Domain};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Persona(#[from] PersonaError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("no corpus for study {study}: {path} not found; run `persona-audit run --study {study}` first")]
    NoCorpus { study: Study, path: PathBuf },
    #[error("no results for study {study} under {path}; run `persona-audit analyze --study {study}` first")]
    NoResults { study: Study, path: PathBuf },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl PipelineError {
    /// 2 for failures talking to the backend, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Probe(e) => match e {
                ProbeError::MissingToken(_)
                | ProbeError::Unauthorized { .. }
                | ProbeError::Http { .. }
                | ProbeError::Transport(_)
                | ProbeError::EmptyResponse
                | ProbeError::Malformed(_)
                | ProbeError::TooManyMissing { .. } => 2,
                _ => 1,
            },
            PipelineError::Analysis(AnalysisError::Probe(ProbeError::TooManyMissing { .. })) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

/// One unit of probing work.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Job {
    Annotation { construct: Construct, mode: PersonaMode, factor: HumanFactor },
    Generation { domain: Domain, mode: PersonaMode, factors: Vec<HumanFactor> },
    Validation { domain: Domain },
}

fn factor_key(factors: &[HumanFactor]) -> String {
    if factors.len() == HumanFactor::ALL.len() {
        "full".into()
    } else {
        factors.iter().map(|f| f.as_str()).collect::<Vec<_>>().join("+")
    }
}

/// Paths of everything the pipeline reads and writes.
#[derive(Debug, Clone)]
pub struct Layout {
    pub cache_dir: PathBuf,
}

impl Layout {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        Layout { cache_dir: cache_dir.into() }
    }

    pub fn personas(&self) -> PathBuf {
        self.cache_dir.join("personas.jsonl")
    }

    pub fn judge_cache(&self) -> PathBuf {
        self.cache_dir.join("judge")
    }

    pub fn annotation(&self, construct: Construct, mode: PersonaMode, factor: HumanFactor) -> PathBuf {
        self.cache_dir.join("annotations").join(format!("{construct}_{mode}_{factor}.jsonl"))
    }

    pub fn corpus(&self, domain: Domain, mode: PersonaMode, factors: &[HumanFactor]) -> PathBuf {
        self.cache_dir.join("corpora").join(format!("{domain}_{mode}_{}.jsonl", factor_key(factors)))
    }

    pub fn validation(&self, domain: Domain) -> PathBuf {
        self.cache_dir.join("validation").join(format!("{domain}.jsonl"))
    }

    pub fn job_output(&self, job: &Job) -> PathBuf {
        match job {
            Job::Annotation { construct, mode, factor } => self.annotation(*construct, *mode, *factor),
            Job::Generation { domain, mode, factors } => self.corpus(*domain, *mode, factors),
            Job::Validation { domain } => self.validation(*domain),
        }
    }
}

fn annotation_jobs(cfg: &RunConfig, jobs: &mut BTreeSet<Job>) {
    for construct in Construct::ALL {
        for &mode in &cfg.tasks.modes {
            for &factor in &cfg.tasks.factors {
                if mode == PersonaMode::Explicit || factor.supports_implicit() {
                    jobs.insert(Job::Annotation { construct, mode, factor });
                }
            }
        }
    }
}

fn explicit(cfg: &RunConfig) -> bool {
    cfg.tasks.modes.contains(&PersonaMode::Explicit)
}

/// Domains whose own factor is selected, for BGT1 and its validation.
fn own_domains(cfg: &RunConfig) -> Vec<Domain> {
    cfg.tasks.domains.iter().copied().filter(|d| cfg.tasks.factors.contains(&d.factor())).collect()
}

/// Probing jobs a study needs under the configured selection.
pub fn jobs_for(cfg: &RunConfig, study: Study) -> BTreeSet<Job> {
    let mut jobs = BTreeSet::new();
    let single = |domain, mode, f| Job::Generation { domain, mode, factors: vec![f] };
    match study {
        Study::Annotation | Study::Reliability => annotation_jobs(cfg, &mut jobs),
        Study::Bgt1 | Study::Validation => {
            for d in own_domains(cfg) {
                if explicit(cfg) {
                    jobs.insert(single(d, PersonaMode::Explicit, d.factor()));
                    if study == Study::Validation {
                        jobs.insert(Job::Validation { domain: d });
                    }
                }
            }
        }
        Study::Bgt2 => {
            for &d in &cfg.tasks.domains {
                for &f in &cfg.tasks.factors {
                    jobs.insert(single(d, PersonaMode::Explicit, f));
                }
            }
        }
        Study::Bgt3 => {
            for &d in &cfg.tasks.domains {
                for &f in cfg.tasks.factors.iter().filter(|f| f.supports_implicit()) {
                    for &mode in &cfg.tasks.modes {
                        jobs.insert(single(d, mode, f));
                    }
                }
            }
        }
        Study::Importance => {
            for &d in &cfg.tasks.domains {
                jobs.insert(Job::Generation { domain: d, mode: PersonaMode::Explicit, factors: HumanFactor::ALL.to_vec() });
                for &f in &cfg.tasks.factors {
                    jobs.insert(single(d, PersonaMode::Explicit, f));
                }
            }
        }
    }
    if !explicit(cfg) {
        jobs.retain(|j| !matches!(j, Job::Generation { mode: PersonaMode::Explicit, .. } | Job::Annotation { mode: PersonaMode::Explicit, .. }));
    }
    jobs
}

/// Union of the jobs of every selected study, in execution order.
pub fn plan(cfg: &RunConfig) -> Vec<Job> {
    let mut all = BTreeSet::new();
    for &study in &cfg.tasks.studies {
        all.extend(jobs_for(cfg, study));
    }
    all.into_iter().collect()
}

fn write_file(path: &Path, write: impl FnOnce(BufWriter<File>) -> std::result::Result<(), ProbeError>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let file = File::create(path).map_err(io_err(path))?;
    write(BufWriter::new(file))?;
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(io_err(path))?))
}

/// Samples the configured population.
pub fn sample(cfg: &RunConfig) -> Result<PersonaSet> {
    Ok(sample_population(&cfg.population, cfg.population.seed)?)
}

/// The persona set of a run: the configured file, else the cached one,
/// else a fresh sample (written to the cache).
pub fn personas(cfg: &RunConfig) -> Result<PersonaSet> {
    if let Some(path) = &cfg.paths.personas {
        return Ok(PersonaSet::read_jsonl(open(path)?)?);
    }
    let layout = Layout::new(&cfg.paths.cache_dir);
    let cached = layout.personas();
    if cached.exists() {
        return Ok(PersonaSet::read_jsonl(open(&cached)?)?);
    }
    let set = sample(cfg)?;
    write_file(&cached, |out| Ok(set.write_jsonl(out)?))?;
    Ok(set)
}

fn name_table(cfg: &RunConfig) -> Result<NameTable> {
    Ok(match &cfg.paths.name_table {
        Some(path) => NameTable::from_csv_path(path)?,
        None => NameTable::bundled(),
    })
}

/// Personas as seen in `mode` for `factor`: implicit ones carry a name
/// signalling the factor.
fn personas_for(base: &PersonaSet, names: &NameTable, cfg: &RunConfig, mode: PersonaMode, factor: HumanFactor) -> Result<PersonaSet> {
    Ok(match mode {
        PersonaMode::Explicit => base.clone(),
        PersonaMode::Implicit => assign_names(base, names, factor, cfg.reference_year, cfg.seed)?,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub jobs: usize,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub backend_calls: u64,
}

/// Executes every planned probing job through the caching prober. Reruns
/// are served from the cache and rewrite identical files.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let layout = Layout::new(&cfg.paths.cache_dir);
    let base = personas(cfg)?;
    let names = name_table(cfg)?;
    let jobs = plan(cfg);
    let prober = Prober::from_config(&cfg.backend, Some(&cfg.paths.cache_dir), cfg.seed)?;
    let needs_judge = jobs.iter().any(|j| matches!(j, Job::Validation { .. }));
    let judge = if needs_judge { Some(Prober::from_config(cfg.judge_config(), Some(&layout.judge_cache()), cfg.seed)?) } else { None };

    for job in &jobs {
        let out = layout.job_output(job);
        log::info!("{job:?} -> {}", out.display());
        match job {
            Job::Annotation { construct, mode, factor } => {
                let set = personas_for(&base, &names, cfg, *mode, *factor)?;
                let table = run_annotation(&prober, &set, &Vignette::bundled_for(*construct), *mode, &[*factor], &cfg.preamble)?;
                write_file(&out, |w| table.write_jsonl(w))?;
            }
            Job::Generation { domain, mode, factors } => {
                let set = match factors.as_slice() {
                    [f] => personas_for(&base, &names, cfg, *mode, *f)?,
                    _ => base.clone(),
                };
                let corpus = run_generation(&prober, &set, &BeliefQuestion::bundled_for(*domain), *mode, factors, &cfg.preamble)?;
                write_file(&out, |w| corpus.write_jsonl(w))?;
            }
            Job::Validation { domain } => {
                let source = layout.corpus(*domain, PersonaMode::Explicit, &[domain.factor()]);
                let corpus = Corpus::read_jsonl(open(&source)?)?;
                let judge = judge.as_ref().expect("judge built when validation is planned");
                let scores = run_validation(judge, &corpus, &ValidationQuestion::bundled_for(*domain))?;
                write_file(&out, |w| scores.write_jsonl(w))?;
            }
        }
    }
    let mut summary = RunSummary { jobs: jobs.len(), ..Default::default() };
    for p in std::iter::once(&prober).chain(judge.as_ref()) {
        let stats = p.stats();
        summary.cache_hits += stats.hits;
        summary.cache_misses += stats.misses;
        summary.backend_calls += p.backend_calls();
    }
    Ok(summary)
}

/// Loads cached probing outputs and memoizes per-corpus effect tables, so
/// a corpus shared by several studies is analysed once.
struct Analyzer<'a> {
    cfg: &'a RunConfig,
    layout: Layout,
    personas: PersonaSet,
    source: FeatureSource,
    effects: HashMap<(PathBuf, HumanFactor), EffectTable>,
}

impl<'a> Analyzer<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        let layout = Layout::new(&cfg.paths.cache_dir);
        let personas = match &cfg.paths.personas {
            Some(p) => PersonaSet::read_jsonl(open(p)?)?,
            None if layout.personas().exists() => PersonaSet::read_jsonl(open(&layout.personas())?)?,
            None => PersonaSet::default(),
        };
        Ok(Analyzer { cfg, layout, personas, source: FeatureSource::Ngrams(cfg.ngrams.clone()), effects: HashMap::new() })
    }

    fn require(&self, study: Study, path: &Path) -> Result<()> {
        if path.exists() {
            Ok(())
        } else {
            Err(PipelineError::NoCorpus { study, path: path.to_path_buf() })
        }
    }

    fn corpus(&self, study: Study, domain: Domain, mode: PersonaMode, factors: &[HumanFactor]) -> Result<Corpus> {
        let path = self.layout.corpus(domain, mode, factors);
        self.require(study, &path)?;
        Ok(Corpus::read_jsonl(open(&path)?)?)
    }

    fn effects(&mut self, study: Study, domain: Domain, mode: PersonaMode, factors: &[HumanFactor], factor: HumanFactor) -> Result<EffectTable> {
        let key = (self.layout.corpus(domain, mode, factors), factor);
        if let Some(t) = self.effects.get(&key) {
            return Ok(t.clone());
        }
        let corpus = self.corpus(study, domain, mode, factors)?;
        let table = corpus_effects(&corpus, &self.personas, factor, &self.source, self.cfg.alpha)?;
        self.effects.insert(key, table.clone());
        Ok(table)
    }

    fn annotations(&self, study: Study, mode: PersonaMode) -> Result<Vec<AnnotationTable>> {
        let mut out = Vec::new();
        for job in jobs_for(self.cfg, study) {
            if let Job::Annotation { construct, mode: m, factor } = job {
                if m == mode {
                    let path = self.layout.annotation(construct, m, factor);
                    self.require(study, &path)?;
                    out.push(AnnotationTable::read_jsonl(open(&path)?)?);
                }
            }
        }
        Ok(out)
    }

    fn study(&mut self, study: Study) -> Result<StudyResult> {
        if self.personas.is_empty() {
            return Err(PipelineError::NoCorpus { study, path: self.layout.personas() });
        }
        let cfg = self.cfg;
        let mut result = StudyResult::new(study, &cfg.fingerprint(), cfg.alpha, cfg.seed);
        let selected = |m: PersonaMode| cfg.tasks.modes.contains(&m);
        match study {
            Study::Annotation => {
                let mut tables = self.annotations(study, PersonaMode::Explicit)?;
                tables.extend(self.annotations(study, PersonaMode::Implicit)?);
                result.grids.push(annotation_effects(&tables, &self.personas, cfg.alpha)?);
            }
            Study::Bgt1 => {
                let lexica = cfg.paths.lexica.iter().map(Lexicon::from_path).collect::<std::result::Result<Vec<_>, _>>().map_err(AnalysisError::from)?;
                for d in own_domains(cfg) {
                    let corpus = self.corpus(study, d, PersonaMode::Explicit, &[d.factor()])?;
                    let out = bgt1(&corpus, &self.personas, d.factor(), &self.source, cfg.alpha)?;
                    result.frequencies.insert(out.full.meta.label.clone(), out.frequencies);
                    result.effect_tables.push(out.full);
                    for lexicon in &lexica {
                        let mut t = corpus_effects(&corpus, &self.personas, d.factor(), &FeatureSource::Lexicon(lexicon.clone()), cfg.alpha)?;
                        t.meta.label = format!("{}:{}", t.meta.label, lexicon.name);
                        result.effect_tables.push(t);
                    }
                }
            }
            Study::Validation => {
                let mut outcomes = Vec::new();
                for d in own_domains(cfg) {
                    let path = self.layout.validation(d);
                    self.require(study, &path)?;
                    let scores = ValidationScores::read_jsonl(open(&path)?)?;
                    outcomes.push((d, bgt1_validation(&scores, &self.personas, d.factor())));
                }
                result.grids.push(validation_grid(outcomes, cfg.alpha)?);
            }
            Study::Bgt2 => {
                for &d in &cfg.tasks.domains {
                    let mut tables = BTreeMap::new();
                    for &f in &cfg.tasks.factors {
                        tables.insert(f, self.effects(study, d, PersonaMode::Explicit, &[f], f)?);
                    }
                    result.grids.push(bgt2(d, &tables, &cfg.meta, cfg.alpha)?);
                }
            }
            Study::Bgt3 => {
                if !selected(PersonaMode::Explicit) || !selected(PersonaMode::Implicit) {
                    return Err(AnalysisError::Precondition("bgt3 needs both explicit and implicit modes selected".into()).into());
                }
                let mut tables = Vec::new();
                for &d in &cfg.tasks.domains {
                    for &f in cfg.tasks.factors.iter().filter(|f| f.supports_implicit()) {
                        let left = self.effects(study, d, PersonaMode::Explicit, &[f], f)?;
                        let right = self.effects(study, d, PersonaMode::Implicit, &[f], f)?;
                        tables.push((d, f, left, right));
                    }
                }
                let pairs: Vec<CrossPair> = tables.iter().map(|(d, f, l, r)| CrossPair { domain: *d, factor: *f, left: l, right: r }).collect();
                result.grids.push(bgt3_grid(&pairs, &cfg.meta, cfg.alpha)?);
            }
            Study::Importance => {
                let mut tables = Vec::new();
                for &d in &cfg.tasks.domains {
                    for &f in &cfg.tasks.factors {
                        let full = self.effects(study, d, PersonaMode::Explicit, &HumanFactor::ALL, f)?;
                        let single = self.effects(study, d, PersonaMode::Explicit, &[f], f)?;
                        tables.push((d, f, full, single));
                    }
                }
                let pairs: Vec<CrossPair> = tables.iter().map(|(d, f, l, r)| CrossPair { domain: *d, factor: *f, left: l, right: r }).collect();
                result.grids.push(importance_grid(&pairs, &cfg.meta, cfg.alpha)?);
            }
            Study::Reliability => {
                let human = match &cfg.paths.human_personas {
                    Some(p) => Some(PersonaSet::read_jsonl(open(p)?)?),
                    None => None,
                };
                let human_tables = cfg
                    .paths
                    .human_annotations
                    .iter()
                    .map(|p| Ok(AnnotationTable::read_jsonl(open(p)?)?))
                    .collect::<Result<Vec<_>>>()?;
                let explicit = self.annotations(study, PersonaMode::Explicit)?;
                let implicit = self.annotations(study, PersonaMode::Implicit)?;
                let mut sources = Vec::new();
                if let Some(h) = &human {
                    sources.push(RaterSource { name: "Human", tables: &human_tables, personas: h });
                }
                if selected(PersonaMode::Explicit) {
                    sources.push(RaterSource { name: "Explicit", tables: &explicit, personas: &self.personas });
                }
                if selected(PersonaMode::Implicit) {
                    sources.push(RaterSource { name: "Implicit", tables: &implicit, personas: &self.personas });
                }
                for construct in Construct::ALL {
                    result.grids.push(reliability_grid(&sources, construct)?);
                }
            }
        }
        Ok(result)
    }
}

/// Computes every selected study from the cache and writes each result
/// under `results_dir`. Returns the result directories.
pub fn analyze(cfg: &RunConfig) -> Result<Vec<(Study, PathBuf)>> {
    let mut analyzer = Analyzer::new(cfg)?;
    let mut written = Vec::new();
    for &study in &cfg.tasks.studies {
        let result = analyzer.study(study)?;
        let dir = result.write(&cfg.paths.results_dir).map_err(PipelineError::Analysis)?;
        log::info!("{study}: {}", dir.display());
        written.push((study, dir));
    }
    Ok(written)
}

/// Reads the results of the selected studies for this configuration.
pub fn load_results(cfg: &RunConfig) -> Result<Vec<StudyResult>> {
    let fingerprint = cfg.fingerprint();
    cfg.tasks
        .studies
        .iter()
        .map(|&study| {
            let dir = StudyResult::new(study, &fingerprint, cfg.alpha, cfg.seed).dir(&cfg.paths.results_dir);
            if !dir.join(analysis::RESULT_FILE).exists() {
                return Err(PipelineError::NoResults { study, path: dir });
            }
            Ok(StudyResult::read(&dir)?)
        })
        .collect()
}

/// Renders tables in every configured format plus BGT1 word clouds into
/// `report_dir/<study>/`. Returns the files written.
pub fn report(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for result in load_results(cfg)? {
        let dir = cfg.paths.report_dir.join(result.study.as_str());
        for &format in &cfg.report.formats {
            files.extend(emit_tables(&result, format, &dir)?);
        }
        if result.study != Study::Bgt1 {
            continue;
        }
        let clouds = dir.join("clouds");
        for table in &result.effect_tables {
            let Some(freq) = result.frequencies.get(&table.meta.label) else { continue };
            let data = wordcloud_data(table, freq, cfg.report.max_terms);
            for (side, entries) in [("positive", &data.positive), ("negative", &data.negative)] {
                if entries.is_empty() {
                    log::info!("{}: no significant {side} terms, no cloud", table.meta.label);
                    continue;
                }
                let rendered = render_svg(entries, &cfg.report.layout)?;
                fs::create_dir_all(&clouds).map_err(io_err(&clouds))?;
                let path = clouds.join(format!("{}_{side}.svg", analysis::file_stem(&table.meta.label)));
                fs::write(&path, rendered.svg).map_err(io_err(&path))?;
                files.push(path);
            }
        }
    }
    Ok(files)
}

/// Full pipeline plus the comparison with published values, written to
/// `report_dir/replication.{csv,md}`.
pub fn replicate(cfg: &RunConfig) -> Result<ReplicationReport> {
    run(cfg)?;
    analyze(cfg)?;
    report(cfg)?;
    let replication = ReplicationReport::build(&load_results(cfg)?)?;
    let table = replication.to_table();
    let dir = &cfg.paths.report_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (ext, text) in [("csv", table.to_csv()?), ("md", table.to_markdown())] {
        let path = dir.join(format!("replication.{ext}"));
        fs::write(&path, text).map_err(io_err(&path))?;
    }
    Ok(replication)
}
