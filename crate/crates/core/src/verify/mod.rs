//! Monte Carlo verification: every analytic claim confronted with simulation.
//!
//! Gates are expressed as `(estimate, SE, multiplier)` so every threshold is
//! auditable in the report. The default multiplier of 4 keeps the per-check
//! false-alarm rate near `1e-4` under a normal approximation. Exact
//! invariants use zero tolerance.

mod checks;
mod samples;
pub mod stats;
mod suite;

pub use checks::{
    invariant_check, ks_check, l1_check, martingale_check, mgf_check, moment_check, total_check,
    CheckResult, MIN_TRIALS,
};
pub use samples::{collect_samples, SampleSet, SeedRange};
pub use suite::{
    default_params, run_suite, run_suite_with, CheckFamily, ExperimentReport, SampleDump,
    SeedEntry, SuiteConfig,
};
