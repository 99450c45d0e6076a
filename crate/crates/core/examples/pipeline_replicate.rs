//! The whole pipeline on the synthetic demo config, in a scratch
//! directory: run, analyze, report, then compare against the published
//! tables. Pass a config path to use another one.
use std::path::PathBuf;

use persona_audit::config::RunConfig;
use persona_audit::pipeline;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/synthetic.json"));
    let scratch = tempfile::tempdir()?;
    let mut cfg = RunConfig::load(&path)?;
    cfg.paths.cache_dir = scratch.path().join("cache");
    cfg.paths.results_dir = scratch.path().join("results");
    cfg.paths.report_dir = scratch.path().join("report");

    let report = pipeline::replicate(&cfg)?;
    println!("{} published cells, {} with a live number", report.rows.len(), report.compared());
    println!("{:<14} {:<22} {:<24} {:>9} {:>9} {:>7}", "grid", "row", "column", "published", "live", "diff");
    for r in report.rows.iter().filter(|r| r.difference.is_some()).take(25) {
        println!(
            "{:<14} {:<22} {:<24} {:>9} {:>9} {:>+7.2}",
            r.grid,
            r.row,
            r.column,
            r.published,
            r.live,
            r.difference.unwrap()
        );
    }
    Ok(())
}
