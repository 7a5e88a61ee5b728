//! Batch experiments: configs in, reports out.
//!
//! The runner owns all parallelism policy; each experiment runs inside a
//! worker pool of the requested size, and every kernel it calls reduces in
//! a fixed order, so reports do not depend on the worker count.

mod config;
mod experiments;
mod golden;
mod plot;
mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{parse_quadrature, quadrature_label, ExperimentConfig, PARAM_KEYS};
pub use experiments::{prepare, Outcome, Prepared, EXPERIMENTS};
pub use golden::{GoldenEntry, GoldenSet};
pub use plot::emit_plot_data;
pub use report::{
    Check, CheckKind, ConvergenceEntry, ExperimentReport, GoldenOutcome, Record, ValueField, ENGINE_VERSION,
};

use crate::error::{Error, Result};

/// Environment variable that sets the worker count when no flag is given.
pub const WORKERS_ENV: &str = "CWCS_WORKERS";

/// Runs one experiment on `workers` threads (0 = all cores).
pub fn run(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    let prepared = prepare(cfg)?;
    let golden = cfg.golden.as_deref().map(GoldenSet::load).transpose()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Validation(format!("cannot start {workers} workers: {e}")))?;
    let start = Instant::now();
    let Prepared { id, params, job, .. } = prepared;
    let outcome = pool.install(job)?;
    let mut report = ExperimentReport {
        id: id.to_string(),
        experiment: id.name.clone(),
        params,
        seed: cfg.seed,
        engine: ENGINE_VERSION.to_string(),
        values: outcome.values,
        convergence: outcome.convergence,
        truncation_loss: outcome.truncation_loss,
        checks: outcome.checks,
        golden: vec![],
        wall_clock: start.elapsed(),
    };
    for c in report.checks.iter_mut() {
        if let Some(&b) = cfg.tolerances.get(&c.name) {
            c.bound = b;
            c.evaluate();
        }
    }
    if let Some(g) = golden {
        g.apply(&mut report);
    }
    Ok(report)
}

/// One run per value of `axis`.
pub fn sweep(cfg: &ExperimentConfig, axis: &str, values: &[String], workers: usize) -> Result<Vec<ExperimentReport>> {
    if values.is_empty() {
        return Err(Error::Validation("sweep needs at least one value".into()));
    }
    if !PARAM_KEYS.contains(&axis) {
        return Err(Error::Validation(format!("cannot sweep `{axis}`; sweepable: {}", PARAM_KEYS.join(", "))));
    }
    // validate every point before spending time on any of them
    let cfgs: Vec<ExperimentConfig> = values.iter().map(|v| cfg.with_param(axis, v)).collect();
    for c in &cfgs {
        prepare(c)?;
    }
    cfgs.iter().map(|c| run(c, workers)).collect()
}

/// Runs every experiment named in a golden file and compares.
pub fn regress(golden: &GoldenSet, seed: u64, workers: usize) -> Result<Vec<ExperimentReport>> {
    let mut out = Vec::new();
    for id in golden.ids() {
        let mut cfg = ExperimentConfig::for_id(&id)?;
        cfg.seed = seed;
        let mut r = run(&cfg, workers)?;
        golden.apply(&mut r);
        out.push(r);
    }
    Ok(out)
}

/// File stem for a report: the experiment id with unsafe characters replaced.
pub fn report_stem(r: &ExperimentReport) -> String {
    r.id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

/// Writes `<stem>.jsonl` and `<stem>.txt` into `dir`, returning both paths.
pub fn write_report(r: &ExperimentReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let stem = report_stem(r);
    let machine = dir.join(format!("{stem}.jsonl"));
    let text = dir.join(format!("{stem}.txt"));
    std::fs::write(&machine, r.to_machine())?;
    std::fs::write(&text, r.to_text())?;
    Ok((machine, text))
}
