//! Batch front end: `simulate`, `analyze` and `verify`.
//!
//! Every command writes only inside `--out`, and every output directory gets a
//! `manifest.json` with the tool version, the resolved configuration and the
//! seeds used, so any run can be replayed.

mod config;

use std::fs;
use std::path::Path;

use polya_core::analytics::limit_law;
use polya_core::export::{
    cdf_table, mgf_grid, to_csv, to_json, trajectory_rows, CsvRecord, MomentRow, SnapshotRow,
};
use polya_core::simulate::{run_trials, simulate_until, snapshots};
use polya_core::verify::stats::derive_seed;
use polya_core::verify::{run_suite_with, CheckFamily, SuiteConfig};
use polya_core::ModelParams;
use serde::Serialize;
use thiserror::Error;

pub use config::{
    parse_config, Command, Format, RunConfig, DEFAULT_PARALLELISM, MAX_HORIZON, MAX_TRIALS,
};

/// ODE steps used for the oracle column of the analyze grid.
pub const GRID_ODE_STEPS: usize = 10_000;

const SIMULATE_SEED_TAG: u64 = 0x7369_6d75;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Clap(#[from] clap::Error),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] polya_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    config: &'a RunConfig,
    seed_manifest: serde_json::Value,
}

#[derive(Serialize)]
struct SeedRecord {
    params: ModelParams,
    seed: u64,
    first_stream: u64,
    count: u64,
}

fn write_manifest<S: Serialize>(cfg: &RunConfig, seeds: &S) -> Result<(), CliError> {
    let manifest = Manifest {
        version: polya_core::VERSION,
        config: cfg,
        seed_manifest: serde_json::to_value(seeds).expect("seeds serialize"),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(cfg.out.join("manifest.json"), text)?;
    Ok(())
}

fn write_rows<R: CsvRecord>(dir: &Path, stem: &str, format: Format, rows: &[R]) -> Result<(), CliError> {
    let body = match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
    };
    fs::write(dir.join(format!("{stem}.{}", format.extension())), body)?;
    Ok(())
}

fn label(p: &ModelParams) -> String {
    format!("a{}_d{}_w{}", p.a(), p.delta(), p.w0())
}

/// Executes a parsed configuration. Returns `true` iff the run succeeded in
/// the exit-status sense (for `verify`: every check passed).
pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    fs::create_dir_all(&cfg.out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match cfg.command {
        Command::Simulate => run_simulate(cfg).map(|()| true),
        Command::Analyze => run_analyze(cfg).map(|()| true),
        Command::Verify => run_verify(cfg),
    })
}

fn run_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let trials = cfg.trials.unwrap_or(1000);
    let mut times = cfg.times.clone();
    times.sort_by(f64::total_cmp);
    let mut seeds = Vec::new();
    for (k, params) in cfg.params.iter().enumerate() {
        let seed = derive_seed(cfg.master_seed, SIMULATE_SEED_TAG, k as u64);
        seeds.push(SeedRecord {
            params: *params,
            seed,
            first_stream: 0,
            count: trials as u64,
        });
        if cfg.trajectory {
            let horizon = *times.last().expect("at least one time");
            let rows = run_trials(trials, seed, 0, |rng| {
                let trial = rng.stream_id();
                Ok(trajectory_rows(trial, &simulate_until(params, horizon, rng)?))
            })?
            .concat();
            write_rows(&cfg.out, &format!("trajectories_{}", label(params)), cfg.format, &rows)?;
        } else {
            let rows = run_trials(trials, seed, 0, |rng| {
                let trial = rng.stream_id();
                Ok(snapshots(params, &times, rng)?
                    .iter()
                    .map(|s| SnapshotRow::new(trial, s))
                    .collect::<Vec<_>>())
            })?
            .concat();
            write_rows(&cfg.out, &format!("snapshots_{}", label(params)), cfg.format, &rows)?;
        }
    }
    write_manifest(cfg, &seeds)
}

fn run_analyze(cfg: &RunConfig) -> Result<(), CliError> {
    let mut moments = Vec::new();
    for params in &cfg.params {
        let grid = mgf_grid(params, &cfg.times, &cfg.u_grid, GRID_ODE_STEPS)?;
        write_rows(&cfg.out, &format!("mgf_grid_{}", label(params)), cfg.format, &grid)?;
        moments.extend(cfg.times.iter().map(|&t| MomentRow::new(params, t)));
    }
    write_rows(&cfg.out, "moments", cfg.format, &moments)?;
    write_manifest(cfg, &Vec::<SeedRecord>::new())
}

/// The suite configuration a `verify` run resolves to.
pub fn suite_config(cfg: &RunConfig) -> SuiteConfig {
    let mut suite = SuiteConfig {
        params: cfg.params.clone(),
        checks: cfg.checks.clone(),
        master_seed: cfg.master_seed,
        ..SuiteConfig::default()
    };
    if let Some(n) = cfg.trials {
        suite = suite.with_trials(n);
    }
    if let Some(&t) = cfg.times.first() {
        suite.ks_t = t;
    }
    if let Some(x) = cfg.ks_threshold {
        suite.ks_threshold = x;
    }
    if let Some(x) = cfg.se_multiplier {
        suite.se_multiplier = x;
    }
    suite
}

fn run_verify(cfg: &RunConfig) -> Result<bool, CliError> {
    let suite = suite_config(cfg);
    let (report, dumps) = run_suite_with(&suite, cfg.dump_samples, cfg.timing)?;
    fs::write(cfg.out.join("report.json"), report.to_json())?;
    let text = report.to_text();
    fs::write(cfg.out.join("report.txt"), &text)?;
    print!("{text}");
    for dump in &dumps {
        let s = &dump.samples;
        let rows: Vec<SnapshotRow> = s
            .records
            .iter()
            .enumerate()
            .map(|(i, &(w, b))| SnapshotRow::new(i as u64, &polya_core::UrnState::new(w, b, s.t)))
            .collect();
        write_rows(&cfg.out, &format!("samples_{}", dump.label), Format::Csv, &rows)?;
        if dump.label.starts_with(CheckFamily::Ks.name()) {
            let table = cdf_table(&s.scaled(), &limit_law(&s.params));
            write_rows(&cfg.out, &format!("cdf_{}", dump.label), Format::Csv, &table)?;
        }
    }
    write_manifest(cfg, &report.seed_manifest)?;
    Ok(report.passed)
}
