use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use persona_audit::analysis::Study;
use persona_audit::config::RunConfig;
use persona_audit::persona::{HumanFactor, PersonaMode};
use persona_audit::pipeline::{self, PipelineError};
use persona_audit::task::Domain;

/// Probe persona-conditioned language models and analyse how the stated
/// persona shapes their annotations and beliefs.
#[derive(Debug, Parser)]
#[command(name = "persona-audit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, clap::Args)]
struct Options {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Restrict to these studies (repeat or comma-separate).
    #[arg(long, global = true, value_delimiter = ',')]
    study: Vec<Study>,
    #[arg(long, global = true, value_delimiter = ',')]
    domain: Vec<Domain>,
    #[arg(long, global = true, value_delimiter = ',')]
    factor: Vec<HumanFactor>,
    #[arg(long, global = true, value_delimiter = ',')]
    mode: Vec<PersonaMode>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// sample: persona file (stdout otherwise); run: cache dir; analyze:
    /// results dir; report and replicate: report dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the persona population as JSONL.
    Sample,
    /// Probe the backend for every selected study (cached).
    Run,
    /// Compute the selected studies from cached outputs.
    Analyze,
    /// Render tables and word clouds from analysed results.
    Report,
    /// Run, analyze and report, then diff against the published tables.
    Replicate,
}

fn load(cli: &Cli) -> Result<RunConfig, PipelineError> {
    let o = &cli.opts;
    let mut cfg = match &o.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if !o.study.is_empty() {
        cfg.tasks.studies = o.study.clone();
    }
    if !o.domain.is_empty() {
        cfg.tasks.domains = o.domain.clone();
    }
    if !o.factor.is_empty() {
        cfg.tasks.factors = o.factor.clone();
    }
    if !o.mode.is_empty() {
        cfg.tasks.modes = o.mode.clone();
    }
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    if let Some(alpha) = o.alpha {
        cfg.alpha = alpha;
    }
    if let Some(out) = &o.out {
        match cli.command {
            Command::Sample => {}
            Command::Run => cfg.paths.cache_dir = out.clone(),
            Command::Analyze => cfg.paths.results_dir = out.clone(),
            Command::Report | Command::Replicate => cfg.paths.report_dir = out.clone(),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), PipelineError> {
    let cfg = load(cli)?;
    match cli.command {
        Command::Sample => {
            let set = pipeline::sample(&cfg)?;
            match &cli.opts.out {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(|source| PipelineError::Io { path: path.clone(), source })?;
                    set.write_jsonl(std::io::BufWriter::new(file))?;
                }
                None => set.write_jsonl(std::io::stdout().lock())?,
            }
            eprintln!("{} personas", set.len());
        }
        Command::Run => {
            let s = pipeline::run(&cfg)?;
            println!("{} jobs, {} cache hits, {} misses, {} backend calls", s.jobs, s.cache_hits, s.cache_misses, s.backend_calls);
        }
        Command::Analyze => {
            for (study, dir) in pipeline::analyze(&cfg)? {
                println!("{study}\t{}", dir.display());
            }
        }
        Command::Report => {
            for file in pipeline::report(&cfg)? {
                println!("{}", file.display());
            }
        }
        Command::Replicate => {
            let r = pipeline::replicate(&cfg)?;
            println!("{} published cells, {} compared; see {}", r.rows.len(), r.compared(), cfg.paths.report_dir.join("replication.md").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.opts.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
