//! Individual statistical checks. Each returns a [`CheckResult`] whose
//! `statistic` and `threshold` make the gate auditable: Monte Carlo gates are
//! z-scores against an SE multiplier, KS gates are distances against a
//! fixed tolerance, exact invariants are violation counts against zero.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytics::{
    l1_bound, martingale_transform, mean_w, mgf_domain_bound, mgf_w, var_w, GammaLaw,
};
use crate::error::{Error, Result};
use crate::model::{ModelParams, UrnState};
use crate::simulate::{run_trials, RandomSource, Simulator};
use crate::verify::samples::{collect_samples, SampleSet};
use crate::verify::stats::{derive_seed, ks_statistic, z_score, Summary};

/// Minimum sample size for the Monte Carlo gates.
pub const MIN_TRIALS: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ModelParams>,
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: Value,
}

impl CheckResult {
    fn new(name: &str, params: Option<ModelParams>, statistic: f64, threshold: f64, detail: Value) -> Self {
        Self {
            name: name.to_string(),
            params,
            statistic,
            threshold,
            passed: statistic <= threshold,
            detail,
        }
    }
}

fn require_trials(got: usize) -> Result<()> {
    if got < MIN_TRIALS {
        Err(Error::TooFewTrials {
            got,
            need: MIN_TRIALS,
        })
    } else {
        Ok(())
    }
}

/// Sample mean and variance of `W(t)` against `E[W(t)]` and `Var[W(t)]`,
/// each within `multiplier` standard errors. The SE of the variance uses the
/// fourth-central-moment formula.
pub fn moment_check(samples: &SampleSet, multiplier: f64) -> Result<CheckResult> {
    require_trials(samples.len())?;
    let s = Summary::of(&samples.values);
    let target_mean = mean_w(&samples.params, samples.t);
    let target_var = var_w(&samples.params, samples.t);
    let z_mean = z_score(s.mean, target_mean, s.se_mean());
    let z_var = z_score(s.variance, target_var, s.se_variance());
    Ok(CheckResult::new(
        "moments",
        Some(samples.params),
        z_mean.max(z_var),
        multiplier,
        json!({
            "t": samples.t,
            "trials": s.n,
            "mean": { "estimate": s.mean, "target": target_mean, "se": s.se_mean(), "z": z_mean },
            "variance": {
                "estimate": s.variance, "target": target_var, "se": s.se_variance(), "z": z_var,
                "se_formula": "sqrt((m4 - (n-3)/(n-1) s^4) / n)",
            },
        }),
    ))
}

/// Empirical `E[e^{uW(t)}]` against `ψ(t, u)` at every grid point.
///
/// Positive `u` is accepted only with a variance margin, `2u < u*(t)`, so that
/// `e^{uW(t)}` has finite variance and the SE is meaningful.
pub fn mgf_check(samples: &SampleSet, u_grid: &[f64], multiplier: f64) -> Result<CheckResult> {
    require_trials(samples.len())?;
    let bound = mgf_domain_bound(&samples.params, samples.t);
    let mut points = Vec::with_capacity(u_grid.len());
    let mut worst: f64 = 0.0;
    for &u in u_grid {
        if u > 0.0 && 2.0 * u >= bound {
            return Err(Error::OutOfDomain(format!(
                "u = {u} lacks a variance margin: need 2u < {bound} at t = {}",
                samples.t
            )));
        }
        let target = mgf_w(&samples.params, samples.t, u)?;
        let transformed: Vec<f64> = samples.values.iter().map(|w| (u * w).exp()).collect();
        let s = Summary::of(&transformed);
        let z = z_score(s.mean, target, s.se_mean());
        worst = worst.max(z);
        points.push(json!({ "u": u, "estimate": s.mean, "target": target, "se": s.se_mean(), "z": z }));
    }
    Ok(CheckResult::new(
        "mgf",
        Some(samples.params),
        worst,
        multiplier,
        json!({ "t": samples.t, "trials": samples.len(), "points": points }),
    ))
}

/// Kolmogorov–Smirnov distance between `scaled` (typically `W(t)/t`) and the
/// gamma law; passes iff `D_n ≤ threshold`.
pub fn ks_check(scaled: &[f64], law: &GammaLaw, threshold: f64) -> Result<CheckResult> {
    require_trials(scaled.len())?;
    let d = ks_statistic(scaled, |x| law.cdf(x));
    Ok(CheckResult::new(
        "ks",
        None,
        d,
        threshold,
        json!({
            "trials": scaled.len(),
            "shape": law.shape,
            "scale": law.scale,
            "sqrt_n_d": d * (scaled.len() as f64).sqrt(),
        }),
    ))
}

/// Conditional-expectation test of `E[e^{−tB}X(t) | F_s] = e^{−sB}X(s)`.
///
/// Simulates `branches` independent paths to `s`; from each realized `X(s)`
/// runs `trials` continuations to `t` and compares the averaged transform
/// with the transform at `s`, componentwise, within `multiplier` SEs.
pub fn martingale_check(
    params: &ModelParams,
    s: f64,
    t: f64,
    branches: usize,
    trials: usize,
    seed: u64,
    multiplier: f64,
) -> Result<CheckResult> {
    if !(s >= 0.0 && t >= s && t.is_finite()) {
        return Err(Error::Config(format!("martingale check needs 0 ≤ s ≤ t, got s = {s}, t = {t}")));
    }
    if branches == 0 {
        return Err(Error::TooFewTrials { got: 0, need: 1 });
    }
    if t > s {
        require_trials(trials)?;
    }
    let mut worst: f64 = 0.0;
    let mut details = Vec::with_capacity(branches);
    for k in 0..branches {
        let x_s = Simulator::new(*params, RandomSource::new(seed, k as u64)).advance_to(s, |_| {})?;
        let at_s = martingale_transform(params, s, &x_s);
        if t == s {
            details.push(json!({ "state_s": [x_s.white, x_s.blue], "target": [at_s.0, at_s.1], "exact": true }));
            continue;
        }
        let cont_seed = derive_seed(seed, 0x6d61_7274, k as u64);
        let ends: Vec<UrnState> = run_trials(trials, cont_seed, 0, |rng| {
            Simulator::from_state(*params, x_s, rng).advance_to(t, |_| {})
        })?;
        let (ws, bs): (Vec<f64>, Vec<f64>) = ends
            .iter()
            .map(|x| martingale_transform(params, t, x))
            .unzip();
        let (sw, sb) = (Summary::of(&ws), Summary::of(&bs));
        let zw = z_score(sw.mean, at_s.0, sw.se_mean());
        let zb = z_score(sb.mean, at_s.1, sb.se_mean());
        worst = worst.max(zw).max(zb);
        details.push(json!({
            "state_s": [x_s.white, x_s.blue],
            "target": [at_s.0, at_s.1],
            "estimate": [sw.mean, sb.mean],
            "se": [sw.se_mean(), sb.se_mean()],
            "z": [zw, zb],
            "continuation_seed": cont_seed,
        }));
    }
    Ok(CheckResult::new(
        "martingale",
        Some(*params),
        worst,
        multiplier,
        json!({ "s": s, "t": t, "branches": branches, "trials": trials, "seed": seed, "points": details }),
    ))
}

/// Empirical `E|W(t)/t − aΔ|` against the L1 bound plus `multiplier` SEs at
/// each time in `t_grid`. The statistic is the largest `(estimate − bound)/SE`,
/// negative when every estimate sits below its bound.
pub fn l1_check(
    params: &ModelParams,
    t_grid: &[f64],
    trials: usize,
    seed: u64,
    multiplier: f64,
) -> Result<CheckResult> {
    require_trials(trials)?;
    let target = params.a() as f64 * params.delta() as f64;
    let mut worst = f64::NEG_INFINITY;
    let mut points = Vec::with_capacity(t_grid.len());
    for (i, &t) in t_grid.iter().enumerate() {
        if !(t > 0.0) {
            return Err(Error::Config(format!("l1 check needs t > 0, got {t}")));
        }
        let samples = collect_samples(params, t, trials, derive_seed(seed, 0x6c31, i as u64))?;
        let dev: Vec<f64> = samples.scaled().iter().map(|x| (x - target).abs()).collect();
        let s = Summary::of(&dev);
        let bound = l1_bound(params, t);
        let se = s.se_mean();
        let margin = if se > 0.0 {
            (s.mean - bound) / se
        } else if s.mean <= bound {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
        worst = worst.max(margin);
        points.push(json!({ "t": t, "estimate": s.mean, "bound": bound, "se": se, "margin": margin }));
    }
    Ok(CheckResult::new(
        "l1",
        Some(*params),
        worst,
        multiplier,
        json!({ "trials": trials, "seed": seed, "points": points }),
    ))
}

/// Exact identities on paired `(W, B)` records (`B − W = Δ`, `τ = W + B =
/// 2W + Δ`, `W ≡ W(0) mod a`) with zero tolerance, plus a KS test of `B(t)/t`
/// against `law`.
pub fn total_check(samples: &SampleSet, law: &GammaLaw, ks_threshold: f64) -> Result<CheckResult> {
    require_trials(samples.records.len())?;
    let p = &samples.params;
    let mut differential = 0u64;
    let mut total = 0u64;
    let mut residue = 0u64;
    for &(w, b) in &samples.records {
        let state = UrnState::new(w, b, samples.t);
        if state.differential() != p.delta() as i64 {
            differential += 1;
        }
        if state.total_balls() != 2 * w + p.delta() {
            total += 1;
        }
        if w % p.a() != p.w0() % p.a() {
            residue += 1;
        }
    }
    let violations = differential + total + residue;
    let blue = samples.scaled_blue();
    let d_blue = ks_statistic(&blue, |x| law.cdf(x));
    let tau_over_t: Vec<f64> = samples
        .records
        .iter()
        .map(|&(w, b)| (w + b) as f64 / samples.t)
        .collect();
    let doubled = GammaLaw::new(law.shape, 2.0 * law.scale)?;
    let d_total = ks_statistic(&tau_over_t, |x| doubled.cdf(x));
    let mut result = CheckResult::new(
        "total",
        Some(*p),
        d_blue,
        ks_threshold,
        json!({
            "t": samples.t,
            "trials": samples.records.len(),
            "violations": {
                "blue_minus_white": differential,
                "total_identity": total,
                "white_residue": residue,
            },
            "ks_blue": d_blue,
            "ks_total_vs_doubled_gamma": d_total,
        }),
    );
    result.passed = result.passed && violations == 0;
    Ok(result)
}

/// Walks full trajectories on `[0, t]` and counts every state that breaks an
/// exact invariant or an epoch that fails to advance time.
pub fn invariant_check(params: &ModelParams, t: f64, trials: usize, seed: u64) -> Result<CheckResult> {
    if trials == 0 {
        return Err(Error::TooFewTrials { got: 0, need: 1 });
    }
    let per_trial: Vec<(u64, u64, u64)> = run_trials(trials, seed, 0, |rng| {
        let mut violations = 0u64;
        let mut epochs = 0u64;
        let mut last = 0.0;
        let mut max_white = params.w0();
        let mut sim = Simulator::new(*params, rng);
        sim.advance_to(t, |e| {
            epochs += 1;
            let s = e.state_after;
            if !s.is_consistent_with(params)
                || s.total_balls() != 2 * s.white + params.delta()
                || e.epoch_time <= last
            {
                violations += 1;
            }
            last = e.epoch_time;
            max_white = max_white.max(s.white);
        })?;
        Ok((violations, epochs, max_white))
    })?;
    let violations: u64 = per_trial.iter().map(|r| r.0).sum();
    let epochs: u64 = per_trial.iter().map(|r| r.1).sum();
    let max_white = per_trial.iter().map(|r| r.2).max().unwrap_or(0);
    Ok(CheckResult::new(
        "invariants",
        Some(*params),
        violations as f64,
        0.0,
        json!({ "t": t, "trials": trials, "epochs_checked": epochs, "max_white": max_white, "seed": seed }),
    ))
}
