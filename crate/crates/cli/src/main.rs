use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cwcs::runner::{self, ExperimentConfig, ExperimentReport, GoldenSet, EXPERIMENTS, PARAM_KEYS, WORKERS_ENV};
use cwcs::{catalog, Error};

/// Batch runner for the cwcs experiment catalog.
///
/// Exit status: 0 when every check passes, 1 when a check or golden
/// comparison fails, 2 on invalid input.
#[derive(Parser)]
#[command(name = "cwcs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        /// Experiment id, e.g. `wcs?metric=round-s3&action=hopf&k=2`.
        id: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run an experiment once per value of one parameter and print a plot table.
    Sweep {
        id: Option<String>,
        /// Parameter to vary (overrides `sweep.axis`).
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated values (overrides `sweep.values`).
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-run every experiment in a golden file and compare field by field.
    Regress {
        #[command(flatten)]
        common: Common,
    },
    /// Print the experiment, metric and action catalogs.
    List,
}

#[derive(Args)]
struct Common {
    /// Experiment config file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for reports (`.jsonl` and `.txt` per run).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = WORKERS_ENV, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Golden file to compare against.
    #[arg(long)]
    golden: Option<PathBuf>,
}

enum Failure {
    Input(Error),
    Tolerance,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { id, common } => run(id, &common),
        Command::Sweep { id, axis, values, common } => sweep(id, axis, values, &common),
        Command::Regress { common } => regress(&common),
        Command::List => {
            list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tolerance) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_config(id: Option<String>, common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (id, &common.config) {
        (Some(id), None) => ExperimentConfig::for_id(&id)?,
        (None, Some(path)) => ExperimentConfig::parse(&read(path)?)?,
        (Some(_), Some(_)) => return Err(Error::Validation("give either an experiment id or --config, not both".into())),
        (None, None) => return Err(Error::Validation("no experiment: give an id or --config".into())),
    };
    if let Some(seed) = common.seed {
        cfg.set_seed(seed);
    }
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    if common.golden.is_some() {
        cfg.golden = common.golden.clone();
    }
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn save(r: &ExperimentReport, out: Option<&Path>) -> Result<(), Error> {
    if let Some(dir) = out {
        let (machine, _) = runner::write_report(r, dir)?;
        eprintln!("wrote {}", machine.display());
    }
    Ok(())
}

fn verdict(reports: &[ExperimentReport]) -> Result<(), Failure> {
    if reports.iter().all(ExperimentReport::passed) {
        Ok(())
    } else {
        Err(Failure::Tolerance)
    }
}

fn run(id: Option<String>, common: &Common) -> Result<(), Failure> {
    let cfg = load_config(id, common)?;
    let r = runner::run(&cfg, common.workers)?;
    print!("{}", r.to_text());
    save(&r, cfg.out.as_deref())?;
    verdict(&[r])
}

fn sweep(id: Option<String>, axis: Option<String>, values: Vec<String>, common: &Common) -> Result<(), Failure> {
    let cfg = load_config(id, common)?;
    let axis = axis
        .or_else(|| cfg.sweep_axis.clone())
        .ok_or_else(|| Error::Validation("sweep needs --axis or sweep.axis".into()))?;
    let values = if values.is_empty() { cfg.sweep_values.clone() } else { values };
    let reports = runner::sweep(&cfg, &axis, &values, common.workers)?;
    let table = runner::emit_plot_data(&reports, &axis)?;
    print!("{table}");
    if let Some(dir) = cfg.out.as_deref() {
        for r in &reports {
            save(r, Some(dir))?;
        }
        let path = dir.join(format!("{}-{axis}.csv", reports[0].experiment));
        std::fs::write(&path, &table).map_err(Error::from)?;
        eprintln!("wrote {}", path.display());
    }
    for r in reports.iter().filter(|r| !r.passed()) {
        eprintln!("FAIL {}", r.id);
    }
    verdict(&reports)
}

fn regress(common: &Common) -> Result<(), Failure> {
    let path = common.golden.as_ref().ok_or_else(|| Error::Validation("regress needs --golden".into()))?;
    if common.config.is_some() {
        return Err(Error::Validation("regress takes its experiments from --golden, not --config".into()).into());
    }
    let golden = GoldenSet::load(path)?;
    let reports = runner::regress(&golden, common.seed.unwrap_or(0), common.workers)?;
    for r in &reports {
        save(r, common.out.as_deref())?;
        let failed: Vec<String> = r
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.clone())
            .chain(r.golden.iter().filter(|g| !g.passed).map(|g| format!("golden:{}", g.field)))
            .collect();
        if failed.is_empty() {
            println!("pass  {}  ({:.1} s)", r.id, r.wall_clock.as_secs_f64());
        } else {
            println!("FAIL  {}  [{}]", r.id, failed.join(", "));
        }
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    println!("{passed}/{} experiments pass", reports.len());
    verdict(&reports)
}

fn list() {
    println!("experiments:");
    for (name, params) in EXPERIMENTS {
        println!("  {name:<20} {params}");
    }
    println!("\nmetrics:");
    for m in catalog::METRICS {
        println!("  {m}");
    }
    println!("\nactions:");
    for a in catalog::ACTIONS {
        println!("  {a}");
    }
    println!("\nconfig keys: experiment seed quadrature loop_nodes refine symmetry out golden tol.NAME sweep.axis sweep.values");
    println!("parameter keys: {}", PARAM_KEYS.join(" "));
}
