use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analytics::limit_law;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::verify::checks::{
    invariant_check, ks_check, l1_check, martingale_check, mgf_check, moment_check, total_check,
    CheckResult,
};
use crate::verify::samples::{collect_samples, SampleSet};
use crate::verify::stats::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckFamily {
    Moments,
    Mgf,
    Ks,
    Martingale,
    L1,
    Total,
    Invariants,
}

impl CheckFamily {
    pub const DEFAULT: [CheckFamily; 6] = [
        CheckFamily::Moments,
        CheckFamily::Mgf,
        CheckFamily::Ks,
        CheckFamily::Martingale,
        CheckFamily::L1,
        CheckFamily::Total,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckFamily::Moments => "moments",
            CheckFamily::Mgf => "mgf",
            CheckFamily::Ks => "ks",
            CheckFamily::Martingale => "martingale",
            CheckFamily::L1 => "l1",
            CheckFamily::Total => "total",
            CheckFamily::Invariants => "invariants",
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

impl FromStr for CheckFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "moments" => CheckFamily::Moments,
            "mgf" => CheckFamily::Mgf,
            "ks" => CheckFamily::Ks,
            "martingale" => CheckFamily::Martingale,
            "l1" => CheckFamily::L1,
            "total" => CheckFamily::Total,
            "invariants" => CheckFamily::Invariants,
            other => return Err(Error::Config(format!("unknown check family `{other}`"))),
        })
    }
}

/// Everything a verification campaign needs. Echoed verbatim into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub params: Vec<ModelParams>,
    pub checks: Vec<CheckFamily>,
    pub master_seed: u64,
    pub se_multiplier: f64,
    pub moment_t: f64,
    pub moment_trials: usize,
    pub mgf_t: f64,
    pub mgf_trials: usize,
    pub mgf_u_grid: Vec<f64>,
    pub ks_t: f64,
    pub ks_trials: usize,
    pub ks_threshold: f64,
    pub martingale_s: f64,
    pub martingale_t: f64,
    pub martingale_branches: usize,
    pub martingale_trials: usize,
    pub l1_t_grid: Vec<f64>,
    pub l1_trials: usize,
    pub invariant_t: f64,
    pub invariant_trials: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            params: default_params(),
            checks: CheckFamily::DEFAULT.to_vec(),
            master_seed: 42,
            se_multiplier: 4.0,
            moment_t: 10.0,
            moment_trials: 100_000,
            mgf_t: 1.0,
            mgf_trials: 100_000,
            mgf_u_grid: vec![-2.0, -1.0, -0.5, -0.1],
            ks_t: 200.0,
            ks_trials: 10_000,
            ks_threshold: 0.03,
            martingale_s: 2.0,
            martingale_t: 5.0,
            martingale_branches: 5,
            martingale_trials: 10_000,
            l1_t_grid: vec![1.0, 10.0, 100.0],
            l1_trials: 10_000,
            invariant_t: 50.0,
            invariant_trials: 10_000,
        }
    }
}

/// `(1,1,0)`, `(2,2,2)`, `(1,3,5)`.
pub fn default_params() -> Vec<ModelParams> {
    [(1, 1, 0), (2, 2, 2), (1, 3, 5)]
        .into_iter()
        .map(|(a, d, w)| ModelParams::new(a, d, w).expect("default parameters are tenable"))
        .collect()
}

impl SuiteConfig {
    /// Sets every family's trial count (and the martingale continuation count).
    pub fn with_trials(mut self, trials: usize) -> Self {
        self.moment_trials = trials;
        self.mgf_trials = trials;
        self.ks_trials = trials;
        self.martingale_trials = trials;
        self.l1_trials = trials;
        self.invariant_trials = trials;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("se_multiplier", self.se_multiplier)?;
        positive("ks_threshold", self.ks_threshold)?;
        positive("ks_t", self.ks_t)?;
        positive("martingale_t", self.martingale_t)?;
        positive("invariant_t", self.invariant_t)?;
        if !(self.moment_t >= 0.0 && self.mgf_t >= 0.0) {
            return Err(Error::Config("moment_t and mgf_t must be nonnegative".into()));
        }
        if !(self.martingale_s >= 0.0 && self.martingale_s <= self.martingale_t) {
            return Err(Error::Config(format!(
                "martingale_s must lie in [0, martingale_t], got s = {}, t = {}",
                self.martingale_s, self.martingale_t
            )));
        }
        for &t in &self.l1_t_grid {
            positive("l1_t_grid entry", t)?;
        }
        Ok(())
    }
}

/// Seeds used by one check, for replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub check: String,
    pub params: ModelParams,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub config: SuiteConfig,
    pub results: Vec<CheckResult>,
    pub seed_manifest: Vec<SeedEntry>,
    pub passed: bool,
    /// Only filled in when timing is requested, since it breaks byte-identical replay.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_seconds: Option<f64>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned plain-text table, one line per check.
    pub fn to_text(&self) -> String {
        let rows: Vec<[String; 5]> = self
            .results
            .iter()
            .map(|r| {
                [
                    r.name.clone(),
                    r.params.map_or_else(|| "-".to_string(), |p| p.to_string()),
                    format!("{:.6}", r.statistic),
                    format!("{:.6}", r.threshold),
                    if r.passed { "PASS" } else { "FAIL" }.to_string(),
                ]
            })
            .collect();
        let header = ["check", "params", "statistic", "threshold", "result"].map(String::from);
        let mut widths = header.clone().map(|h| h.len());
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "polya verify report (version {}, master seed {})", self.version, self.config.master_seed);
        for row in std::iter::once(&header).chain(&rows) {
            let line: Vec<String> = row
                .iter()
                .zip(widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        let _ = writeln!(out, "overall: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

/// Samples kept for optional CSV dumps.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDump {
    pub label: String,
    pub samples: SampleSet,
}

/// Runs every enabled family over every parameter triple.
pub fn run_suite(config: &SuiteConfig) -> Result<ExperimentReport> {
    run_suite_with(config, false, false).map(|(r, _)| r)
}

/// [`run_suite`] with optional sample retention and wall-clock timing.
pub fn run_suite_with(
    config: &SuiteConfig,
    keep_samples: bool,
    timing: bool,
) -> Result<(ExperimentReport, Vec<SampleDump>)> {
    config.validate()?;
    let start = Instant::now();
    let mut results = Vec::new();
    let mut manifest = Vec::new();
    let mut dumps = Vec::new();
    let mut checks = config.checks.clone();
    checks.sort();
    checks.dedup();
    let mult = config.se_multiplier;
    // The ks and total families read the same draws at ks_t.
    let mut limit_samples: Vec<Option<SampleSet>> = vec![None; config.params.len()];

    for family in checks {
        for (i, params) in config.params.iter().enumerate() {
            let tag = match family {
                CheckFamily::Total => CheckFamily::Ks.tag(),
                other => other.tag(),
            };
            let seed = derive_seed(config.master_seed, tag, i as u64);
            manifest.push(SeedEntry {
                check: family.name().to_string(),
                params: *params,
                seed,
            });
            let label = format!("{}_a{}_d{}_w{}", family.name(), params.a(), params.delta(), params.w0());
            let mut keep = |samples: SampleSet| {
                if keep_samples {
                    dumps.push(SampleDump {
                        label: label.clone(),
                        samples,
                    });
                }
            };
            let result = match family {
                CheckFamily::Moments => {
                    let s = collect_samples(params, config.moment_t, config.moment_trials, seed)?;
                    let r = moment_check(&s, mult)?;
                    keep(s);
                    r
                }
                CheckFamily::Mgf => {
                    let s = collect_samples(params, config.mgf_t, config.mgf_trials, seed)?;
                    let r = mgf_check(&s, &config.mgf_u_grid, mult)?;
                    keep(s);
                    r
                }
                CheckFamily::Ks | CheckFamily::Total => {
                    let s = match limit_samples[i].take() {
                        Some(s) => s,
                        None => collect_samples(params, config.ks_t, config.ks_trials, seed)?,
                    };
                    let law = limit_law(params);
                    let r = if family == CheckFamily::Ks {
                        let mut r = ks_check(&s.scaled(), &law, config.ks_threshold)?;
                        r.params = Some(*params);
                        r
                    } else {
                        total_check(&s, &law, config.ks_threshold)?
                    };
                    if family == CheckFamily::Ks {
                        limit_samples[i] = Some(s.clone());
                    }
                    keep(s);
                    r
                }
                CheckFamily::Martingale => martingale_check(
                    params,
                    config.martingale_s,
                    config.martingale_t,
                    config.martingale_branches,
                    config.martingale_trials,
                    seed,
                    mult,
                )?,
                CheckFamily::L1 => l1_check(params, &config.l1_t_grid, config.l1_trials, seed, mult)?,
                CheckFamily::Invariants => {
                    invariant_check(params, config.invariant_t, config.invariant_trials, seed)?
                }
            };
            results.push(result);
        }
    }

    let passed = results.iter().all(|r| r.passed);
    Ok((
        ExperimentReport {
            version: crate::VERSION.to_string(),
            config: config.clone(),
            results,
            seed_manifest: manifest,
            passed,
            wall_clock_seconds: timing.then(|| start.elapsed().as_secs_f64()),
        },
        dumps,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            ks_t: 20.0,
            ks_threshold: 0.08,
            l1_t_grid: vec![1.0, 5.0],
            invariant_t: 5.0,
            checks: CheckFamily::DEFAULT.to_vec(),
            ..SuiteConfig::default()
        }
        .with_trials(2_000)
    }

    #[test]
    fn empty_check_list_is_empty_success() {
        let cfg = SuiteConfig {
            checks: vec![],
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.results.is_empty());
        assert!(r.passed);
    }

    #[test]
    fn default_config_shape() {
        let cfg = SuiteConfig::default();
        assert_eq!(cfg.checks.len(), 6);
        assert_eq!(cfg.params.len(), 3);
    }

    #[test]
    fn small_suite_runs_and_is_reproducible() {
        let cfg = small();
        let a = run_suite(&cfg).unwrap();
        let b = run_suite(&cfg).unwrap();
        assert_eq!(a.results.len(), 18);
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.to_text().contains("martingale"));
        assert_eq!(a.seed_manifest.len(), 18);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = SuiteConfig {
            martingale_s: 9.0,
            ..SuiteConfig::default()
        };
        assert!(matches!(run_suite(&cfg), Err(Error::Config(_))));
        assert!("bogus".parse::<CheckFamily>().is_err());
    }

    #[test]
    fn report_json_round_trips() {
        let cfg = SuiteConfig {
            checks: vec![CheckFamily::Invariants],
            ..small()
        };
        let r = run_suite(&cfg).unwrap();
        let back: ExperimentReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
