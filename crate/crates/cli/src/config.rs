//! Argument parsing and config-file merging.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use polya_core::verify::CheckFamily;
use polya_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_PARALLELISM: usize = 4;
pub const MAX_HORIZON: f64 = 1_000.0;
pub const MAX_TRIALS: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "polya", version, about = "Simulate and verify the constant-differentials Pólya process")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Debug, Subcommand)]
enum Commands {
    /// Simulate urn paths and write snapshot (default) or full trajectory tables.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Record every epoch up to the largest --t instead of snapshots.
        #[arg(long)]
        trajectory: bool,
    },
    /// Evaluate closed forms on a grid: MGF vs ODE oracle, moments, gamma law, L1 bound.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// MGF argument grid (repeatable).
        #[arg(long = "u", allow_negative_numbers = true)]
        u: Vec<f64>,
    },
    /// Run the Monte Carlo verification suite; exit status 0 iff every check passes.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated check families.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long)]
        ks_threshold: Option<f64>,
        #[arg(long)]
        se_multiplier: Option<f64>,
        /// Record wall-clock time in the report (breaks byte-identical replay).
        #[arg(long)]
        timing: bool,
        /// Write per-check sample CSVs next to the report.
        #[arg(long)]
        dump_samples: bool,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Flat TOML file with keys mirroring the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ball addition amount (repeatable, zipped with --delta and --w0).
    #[arg(long = "a")]
    a: Vec<u64>,
    #[arg(long)]
    delta: Vec<u64>,
    #[arg(long)]
    w0: Vec<u64>,
    /// Time points (repeatable).
    #[arg(long = "t")]
    t: Vec<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    parallelism: Option<usize>,
    /// Lift the horizon and trial-count caps.
    #[arg(long)]
    allow_large: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Simulate,
    Analyze,
    Verify,
}

/// Fully resolved configuration; echoed into every output directory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub params: Vec<ModelParams>,
    pub times: Vec<f64>,
    pub u_grid: Vec<f64>,
    /// `None` leaves the per-family defaults of the verify suite alone.
    pub trials: Option<usize>,
    pub master_seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub parallelism: usize,
    pub trajectory: bool,
    pub allow_large: bool,
    pub checks: Vec<CheckFamily>,
    pub ks_threshold: Option<f64>,
    pub se_multiplier: Option<f64>,
    pub timing: bool,
    pub dump_samples: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    a: Option<OneOrMany<u64>>,
    delta: Option<OneOrMany<u64>>,
    w0: Option<OneOrMany<u64>>,
    t: Option<OneOrMany<f64>>,
    u: Option<OneOrMany<f64>>,
    trials: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    parallelism: Option<usize>,
    trajectory: Option<bool>,
    allow_large: Option<bool>,
    checks: Option<OneOrMany<String>>,
    ks_threshold: Option<f64>,
    se_multiplier: Option<f64>,
    timing: Option<bool>,
    dump_samples: Option<bool>,
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn pick<T>(flag: Vec<T>, file: Option<OneOrMany<T>>) -> Vec<T> {
    if !flag.is_empty() {
        flag
    } else {
        file.map(OneOrMany::into_vec).unwrap_or_default()
    }
}

fn zip_params(a: Vec<u64>, delta: Vec<u64>, w0: Vec<u64>) -> Result<Vec<ModelParams>, CliError> {
    if a.is_empty() && delta.is_empty() && w0.is_empty() {
        return Ok(polya_core::verify::default_params());
    }
    let n = a.len().max(delta.len()).max(w0.len());
    // A single value broadcasts; otherwise lengths must match.
    let expand = |name: &str, v: Vec<u64>, default: u64| -> Result<Vec<u64>, CliError> {
        match v.len() {
            0 => Ok(vec![default; n]),
            1 => Ok(vec![v[0]; n]),
            len if len == n => Ok(v),
            len => Err(CliError::Usage(format!(
                "--{name} given {len} times but the parameter matrix has {n} rows"
            ))),
        }
    };
    let a = expand("a", a, 1)?;
    let delta = expand("delta", delta, 1)?;
    let w0 = expand("w0", w0, 0)?;
    a.into_iter()
        .zip(delta)
        .zip(w0)
        .map(|((a, d), w)| {
            ModelParams::new(a, d, w).map_err(|e| {
                CliError::Config(format!("invalid parameters (a={a}, delta={d}, w0={w}): {e}"))
            })
        })
        .collect()
}

/// Parses `argv` (including the program name) into a resolved configuration.
pub fn parse_config<I, S>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let (command, common, extra) = match cli.command {
        Commands::Simulate { common, trajectory } => (
            Command::Simulate,
            common,
            Extra {
                trajectory,
                ..Extra::default()
            },
        ),
        Commands::Analyze { common, u } => (Command::Analyze, common, Extra { u, ..Extra::default() }),
        Commands::Verify {
            common,
            checks,
            ks_threshold,
            se_multiplier,
            timing,
            dump_samples,
        } => (
            Command::Verify,
            common,
            Extra {
                checks,
                ks_threshold,
                se_multiplier,
                timing,
                dump_samples,
                ..Extra::default()
            },
        ),
    };
    let file = match &common.config {
        Some(path) => read_file_config(path)?,
        None => FileConfig::default(),
    };

    let params = zip_params(
        pick(common.a, file.a),
        pick(common.delta, file.delta),
        pick(common.w0, file.w0),
    )?;
    let mut times = pick(common.t, file.t);
    let mut u_grid = pick(extra.u, file.u);
    let check_names = pick(extra.checks, file.checks);
    let trials = common.trials.or(file.trials);
    let allow_large = common.allow_large || file.allow_large.unwrap_or(false);

    match command {
        Command::Simulate if times.is_empty() => times = vec![10.0],
        Command::Analyze if times.is_empty() => times = vec![0.5, 1.0, 5.0, 20.0],
        _ => {}
    }
    if command == Command::Analyze && u_grid.is_empty() {
        u_grid = vec![-2.0, -1.0, -0.5, -0.1, 0.0];
    }
    for &t in &times {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!("--t must be finite and nonnegative, got {t}")));
        }
        if t > MAX_HORIZON && !allow_large {
            return Err(CliError::Usage(format!(
                "--t {t} exceeds the horizon cap {MAX_HORIZON}; pass --allow-large to override"
            )));
        }
    }
    if command == Command::Verify && times.len() > 1 {
        return Err(CliError::Usage(
            "verify takes at most one --t (the limit-law horizon)".into(),
        ));
    }
    if let Some(n) = trials {
        if n == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if n > MAX_TRIALS && !allow_large {
            return Err(CliError::Usage(format!(
                "--trials {n} exceeds the cap {MAX_TRIALS}; pass --allow-large to override"
            )));
        }
    }
    let checks = if check_names.is_empty() {
        CheckFamily::DEFAULT.to_vec()
    } else {
        check_names
            .iter()
            .map(|s| s.trim().parse::<CheckFamily>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Usage(e.to_string()))?
    };
    let parallelism = common.parallelism.or(file.parallelism).unwrap_or(DEFAULT_PARALLELISM);
    if parallelism == 0 {
        return Err(CliError::Usage("--parallelism must be at least 1".into()));
    }

    Ok(RunConfig {
        command,
        params,
        times,
        u_grid,
        trials,
        master_seed: common.seed.or(file.seed).unwrap_or(42),
        out: common.out.or(file.out).unwrap_or_else(|| PathBuf::from("polya-out")),
        format: common.format.or(file.format).unwrap_or(Format::Csv),
        parallelism,
        trajectory: extra.trajectory || file.trajectory.unwrap_or(false),
        allow_large,
        checks,
        ks_threshold: extra.ks_threshold.or(file.ks_threshold),
        se_multiplier: extra.se_multiplier.or(file.se_multiplier),
        timing: extra.timing || file.timing.unwrap_or(false),
        dump_samples: extra.dump_samples || file.dump_samples.unwrap_or(false),
    })
}

#[derive(Debug, Default)]
struct Extra {
    trajectory: bool,
    u: Vec<f64>,
    checks: Vec<String>,
    ks_threshold: Option<f64>,
    se_multiplier: Option<f64>,
    timing: bool,
    dump_samples: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        std::iter::once("polya".to_string())
            .chain(s.split_whitespace().map(String::from))
            .collect()
    }

    #[test]
    fn parses_simulate_example() {
        let cfg = parse_config(argv("simulate --a 1 --delta 1 --w0 0 --t 10 --trials 1000 --seed 42")).unwrap();
        assert_eq!(cfg.command, Command::Simulate);
        assert_eq!(cfg.params, vec![ModelParams::new(1, 1, 0).unwrap()]);
        assert_eq!(cfg.times, vec![10.0]);
        assert_eq!(cfg.trials, Some(1000));
        assert_eq!(cfg.master_seed, 42);
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn zero_delta_cites_tenability() {
        let err = parse_config(argv("simulate --delta 0")).unwrap_err();
        assert!(err.to_string().contains("tenability"), "{err}");
    }

    #[test]
    fn missing_subcommand_is_usage_error() {
        let err = parse_config(argv("")).unwrap_err();
        assert!(matches!(err, CliError::Clap(_)));
        assert!(err.to_string().contains("Usage"));
    }

    #[test]
    fn parameter_matrix_zips_and_broadcasts() {
        let cfg = parse_config(argv("analyze --a 1 --a 2 --delta 3 --w0 0 --w0 4")).unwrap();
        let got: Vec<_> = cfg.params.iter().map(|p| (p.a(), p.delta(), p.w0())).collect();
        assert_eq!(got, vec![(1, 3, 0), (2, 3, 4)]);
        assert!(parse_config(argv("analyze --a 1 --a 2 --a 3 --w0 0 --w0 4")).is_err());
    }

    #[test]
    fn caps_need_override() {
        assert!(parse_config(argv("simulate --t 5000")).is_err());
        assert!(parse_config(argv("simulate --t 5000 --allow-large")).is_ok());
        assert!(parse_config(argv("simulate --trials 2000000")).is_err());
    }

    #[test]
    fn verify_flags() {
        let cfg = parse_config(argv("verify --checks moments,ks --ks-threshold 0.05 --se-multiplier 5")).unwrap();
        assert_eq!(cfg.checks, vec![CheckFamily::Moments, CheckFamily::Ks]);
        assert_eq!(cfg.ks_threshold, Some(0.05));
        assert_eq!(cfg.se_multiplier, Some(5.0));
        assert_eq!(cfg.params.len(), 3);
        assert!(parse_config(argv("verify --checks nope")).is_err());
    }

    #[test]
    fn analyze_accepts_negative_u() {
        let cfg = parse_config(argv("analyze --u -1 --u -0.5")).unwrap();
        assert_eq!(cfg.u_grid, vec![-1.0, -0.5]);
    }
}
