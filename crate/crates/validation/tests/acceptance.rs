//! Acceptance criteria 1 to 11. Runs as a plain binary and prints one
//! `PASS`/`FAIL` line per criterion, then exits non-zero if any failed.

use std::process::ExitCode;
use std::time::Instant;

use polya_core::analytics::{
    characteristic_curve, characteristic_drift, integrate_characteristic_ode, l1_bound,
    limit_law, mean_vector, mean_w, mgf_domain_bound, mgf_w, bivariate_pde_residual,
    pde_residual, GammaLaw,
};
use polya_core::simulate::{run_trials, RandomSource};
use polya_core::verify::stats::{derive_seed, ks_statistic, z_score, Summary};
use polya_core::verify::{
    collect_samples, invariant_check, ks_check, l1_check, martingale_check, run_suite,
    total_check, CheckFamily, SampleSet, SuiteConfig,
};
use polya_core::ModelParams;

const MASTER_SEED: u64 = 20_240_601;
const SE_MULT: f64 = 4.0;
const KS_THRESHOLD: f64 = 0.03;

fn triples() -> Vec<ModelParams> {
    [(1, 1, 0), (2, 2, 2), (1, 3, 5)]
        .into_iter()
        .map(|(a, d, w)| ModelParams::new(a, d, w).unwrap())
        .collect()
}

fn seed(criterion: u64, index: usize) -> u64 {
    derive_seed(MASTER_SEED, criterion, index as u64)
}

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { passed: true, lines: Vec::new() }
    }

    fn record(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("    {} {line}", if ok { "ok " } else { "BAD" }));
    }
}

type Criterion = fn(&mut Shared) -> Outcome;

/// Samples reused across criteria.
#[derive(Default)]
struct Shared {
    limit: Option<Vec<SampleSet>>,
}

impl Shared {
    fn limit_samples(&mut self) -> &[SampleSet] {
        self.limit.get_or_insert_with(|| {
            triples()
                .iter()
                .enumerate()
                .map(|(i, p)| collect_samples(p, 200.0, 10_000, seed(7, i)).unwrap())
                .collect()
        })
    }
}

fn exact_invariants(_: &mut Shared) -> Outcome {
    let mut out = Outcome::new();
    for (i, p) in triples().iter().enumerate() {
        let r = invariant_check(p, 50.0, 10_000, seed(1, i)).unwrap();
        out.record(
            r.passed,
            format!("{p}: {} violations over {} epochs", r.statistic, r.detail["epochs_checked"]),
        );
    }
    out
}

/// The variance expression named in criterion 2, taken literally.
fn criterion_variance(p: &ModelParams, t: f64) -> f64 {
    let (a, d, w) = (p.a() as f64, p.delta() as f64, p.w0() as f64);
    a * a * t * (w + d + a * d * t)
}

fn corrected_variance(p: &ModelParams, t: f64) -> f64 {
    let (a, d, w) = (p.a() as f64, p.delta() as f64, p.w0() as f64);
    a * a * t * (2.0 * w + d + a * d * t)
}

fn moment_agreement(_: &mut Shared) -> Outcome {
    let mut out = Outcome::new();
    let t = 10.0;
    for (i, p) in triples().iter().enumerate() {
        let s = Summary::of(&collect_samples(p, t, 100_000, seed(2, i)).unwrap().values);
        let zm = z_score(s.mean, mean_w(p, t), s.se_mean());
        let zv = z_score(s.variance, criterion_variance(p, t), s.se_variance());
        let zc = z_score(s.variance, corrected_variance(p, t), s.se_variance());
        out.record(
            zm <= SE_MULT && zv <= SE_MULT,
            format!(
                "{p}: mean {:.4} vs {} (z={zm:.2}); var {:.2} vs a²t(W0+Δ+aΔt) = {} (z={zv:.2}), vs a²t(2W0+Δ+aΔt) = {} (z={zc:.2})",
                s.mean,
                mean_w(p, t),
                s.variance,
                criterion_variance(p, t),
                corrected_variance(p, t)
            ),
        );
    }
    out
}

fn oracle_steps(p: &ModelParams, t: f64, u: f64) -> (f64, usize) {
    let mut steps = 1_000;
    loop {
        match integrate_characteristic_ode(p, t, u, steps) {
            Ok(v) => return (v, steps),
            Err(_) if steps < 1 << 22 => steps *= 2,
            Err(e) => panic!("ODE oracle failed at (t={t}, u={u}): {e}"),
        }
    }
}

fn mgf_vs_oracle(_: &mut Shared) -> Outcome {
    let mut out = Outcome::new();
    for p in &triples() {
        let mut worst: f64 = 0.0;
        let mut points = 0;
        for t in [0.5, 1.0, 5.0, 20.0] {
            for u in [-2.0, -1.0, -0.5, -0.1, 0.5 * mgf_domain_bound(p, t)] {
                let closed = mgf_w(p, t, u).unwrap();
                let (oracle, _) = oracle_steps(p, t, u);
                worst = worst.max((closed - oracle).abs() / closed.abs());
                points += 1;
            }
        }
        out.record(worst <= 1e-6, format!("{p}: max relative gap {worst:.2e} over {points} grid points"));
    }
    out
}

fn empirical_mgf(_: &mut Shared) -> Outcome {
    let mut out = Outcome::new();
    let p = ModelParams::new(1, 1, 0).unwrap();
    let target = 1.0 / (2.0 - (-1.0f64).exp());
    let closed = mgf_w(&p, 1.0, -1.0).unwrap();
    out.record(
        (closed - target).abs() <= 1e-15,
        format!("closed form {closed} vs 1/(2 − e⁻¹) = {target}"),
    );
    let samples = collect_samples(&p, 1.0, 100_000, seed(4, 0)).unwrap();
    let e: Vec<f64> = samples.values.iter().map(|w| (-w).exp()).collect();
    let s = Summary::of(&e);
    let z = z_score(s.mean, target, s.se_mean());
    out.record(z <= SE_MULT, format!("E[e^(−W(1))] ≈ {:.5} ± {:.5} (z={z:.2})", s.mean, s.se_mean()));
    out
}

fn slope(hs: &[f64], rs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = rs.iter().map(|r| r.abs().ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn pde_residual_order(_: &mut Shared) -> Outcome {
    let mut out = Outcome::new();
    let hs = [1e-2, 1e-3, 1e-4];
    let points = [
        (ModelParams::new(1, 1, 0).unwrap(), 1.0, -0.5),
        (ModelParams::new(2, 2, 2).unwrap(), 0.5, -0.3),
        (ModelParams::new(1, 3, 5).unwrap(), 2.0, 0.1),
    ];
    for (p, t, u) in &points {
        let rs: Vec<f64> = hs.iter().map(|&h| pde_residual(p, *t, *u, h).unwrap()).collect();
        let k = slope(&hs, &rs);
        out.record(
            (k - 2.0).abs() <= 0.2,
            format!("{p} at (t={t}, u={u}): residuals {:.2e} {:.2e} {:.2e}, slope {k:.3}", rs[0], rs[1], rs[2]),
        );
        // Both residuals are central differences of the same function at v = 0,
        // so their gap is stencil truncation and shrinks like h².
        let gap = |h: f64| (bivariate_pde_residual(p, *t, *u, 0.0, h).unwrap() - pde_residual(p, *t, *u, h).unwrap()).abs();
        let (coarse, fine) = (gap(1e-4), gap(1e-6));
        out.record(
            fine <= 1e-8,
            format!("{p} at (t={t}, u={u}): bivariate vs reduced residual gap {coarse:.2e} (h=1e-4), {fine:.2e} (h=1e-6)"),
        );
    }
    out
}

/// Central difference of `s ↦ C(s)` minus `rhs(s, C(s))`, worst case over the grid.
fn characteristic_error(h: f64, rhs: impl Fn(u64, f64, f64) -> f64) -> f64 {
    let mut worst: f64 = 0.0;
    for a in [1u64, 2, 3] {
        let p = ModelParams::new(a, 1, 0).unwrap();
        for t in [0.5, 1.0, 5.0, 20.0] {
            let bound = mgf_domain_bound(&p, t);
            for u in [-2.0, -1.0, -0.5, -0.1, 0.25 * bound, 0.5 * bound, 0.9 * bound] {
                for frac in [0.05, 0.25, 0.5, 0.75, 0.95] {
                    let s = frac * t;
                    let c = |s: f64| characteristic_curve(&p, t, u, s).unwrap();
                    let derivative = (c(s + h) - c(s - h)) / (2.0 * h);
                    let target = rhs(a, s, c(s));
                    worst = worst.max((derivative - target).abs() / target.abs().max(1.0));
                }
            }
        }
    }
    worst
}

fn characteristic_ode_drift_uses_c_not_s(_: &mut Shared) -> Outcome {
    let mut out = Outcome::new();
    let hs = [1e-2, 1e-3, 1e-4];
    let errs: Vec<f64> = hs.iter().map(|&h| characteristic_error(h, |a, _, c| characteristic_drift(a, c))).collect();
    let k = slope(&hs, &errs);
    out.record(
        (k - 2.0).abs() <= 0.2 && errs[2] <= 1e-5,
        format!(
            "C' vs 2 − e^(−aC) − e^(aC): max error {:.2e} {:.2e} {:.2e} (h=1e-2, 1e-3, 1e-4), slope {k:.3}",
            errs[0], errs[1], errs[2]
        ),
    );
    let literal = characteristic_error(1e-3, |a, s, _| characteristic_drift(a, s));
    out.record(
        literal > 1e-2,
        format!("C' vs 2 − e^(−as) − e^(as) (argument s): max error {literal:.2e}, does not hold"),
    );
    out
}

fn gamma_limit(shared: &mut Shared) -> Outcome {
    let mut out = Outcome::new();
    for s in shared.limit_samples() {
        let law = limit_law(&s.params);
        let r = ks_check(&s.scaled(), &law, KS_THRESHOLD).unwrap();
        out.record(r.passed, format!("{}: KS(W(200)/200, Gamma({}, {})) = {:.4}", s.params, law.shape, law.scale, r.statistic));
        let wrong = GammaLaw::new(2.0 * law.shape, law.scale).unwrap();
        let d = ks_statistic(&s.scaled(), |x| wrong.cdf(x));
        out.record(d > KS_THRESHOLD, format!("{}: negative control Gamma({}, {}) gives {d:.4}", s.params, wrong.shape, wrong.scale));
    }
    for (i, law) in [GammaLaw::new(1.0, 1.0).unwrap(), GammaLaw::new(3.0, 1.0).unwrap(), GammaLaw::new(1.0, 4.0).unwrap()]
        .iter()
        .enumerate()
    {
        let n = 10_000;
        let draws: Vec<f64> = run_trials(n, seed(70, i), 0, |mut rng: RandomSource| law.quantile(rng.open_unit())).unwrap();
        let d = ks_statistic(&draws, |x| law.cdf(x));
        let scaled = d * (n as f64).sqrt();
        out.record(
            d <= KS_THRESHOLD && scaled <= 1.95,
            format!("positive control Gamma({}, {}): KS {d:.4}, √n·KS {scaled:.3}", law.shape, law.scale),
        );
    }
    out
}

fn blue_limit_and_total(shared: &mut Shared) -> Outcome {
    let mut out = Outcome::new();
    for s in shared.limit_samples() {
        let law = limit_law(&s.params);
        let r = total_check(s, &law, KS_THRESHOLD).unwrap();
        let v = &r.detail["violations"];
        out.record(
            r.passed,
            format!(
                "{}: KS(B(200)/200) = {:.4}; τ = 2W + Δ mismatches {}, B − W ≠ Δ {}",
                s.params, r.statistic, v["total_identity"], v["blue_minus_white"]
            ),
        );
    }
    out
}

fn martingale(_: &mut Shared) -> Outcome {
    let mut out = Outcome::new();
    for (i, p) in triples().iter().enumerate() {
        let r = martingale_check(p, 2.0, 5.0, 5, 10_000, seed(9, i), SE_MULT).unwrap();
        out.record(r.passed, format!("{p}: s=2 → t=5, worst z over 5 branches {:.2}", r.statistic));
        let r0 = martingale_check(p, 0.0, 5.0, 1, 10_000, seed(90, i), SE_MULT).unwrap();
        out.record(r0.passed, format!("{p}: s=0 → t=5, transformed mean z {:.2}", r0.statistic));
        let samples = collect_samples(p, 5.0, 10_000, seed(91, i)).unwrap();
        let (mw, mb) = mean_vector(p, 5.0);
        let sw = Summary::of(&samples.values);
        let sb = Summary::of(&samples.scaled_blue().iter().map(|x| x * 5.0).collect::<Vec<_>>());
        let (zw, zb) = (z_score(sw.mean, mw, sw.se_mean()), z_score(sb.mean, mb, sb.se_mean()));
        out.record(
            zw <= SE_MULT && zb <= SE_MULT,
            format!("{p}: E[X(5)] ≈ ({:.3}, {:.3}) vs ({mw}, {mb}), z = ({zw:.2}, {zb:.2})", sw.mean, sb.mean),
        );
    }
    out
}

fn l1(_: &mut Shared) -> Outcome {
    let mut out = Outcome::new();
    let p = ModelParams::new(1, 1, 0).unwrap();
    let b = l1_bound(&p, 1.0);
    out.record((b - 2f64.sqrt()).abs() <= 1e-15, format!("bound at (1,1,0), t=1: {b}"));
    for (i, p) in triples().iter().enumerate() {
        let r = l1_check(p, &[1.0, 10.0, 100.0], 10_000, seed(10, i), SE_MULT).unwrap();
        out.record(r.passed, format!("{p}: worst (estimate − bound)/SE = {:.2}", r.statistic));
    }
    out
}

fn determinism(_: &mut Shared) -> Outcome {
    let mut out = Outcome::new();
    let mut cfg = SuiteConfig::default().with_trials(2_000);
    cfg.ks_t = 20.0;
    cfg.l1_t_grid = vec![1.0, 10.0];
    cfg.checks = CheckFamily::DEFAULT.to_vec();
    cfg.checks.push(CheckFamily::Invariants);
    let first = run_suite(&cfg).unwrap().to_json();
    let second = run_suite(&cfg).unwrap().to_json();
    out.record(first == second, format!("two suite runs, {} bytes each, identical: {}", first.len(), first == second));
    cfg.master_seed += 1;
    let other = run_suite(&cfg).unwrap().to_json();
    out.record(other != first, "a different master seed changes the report".into());
    out
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("exact invariants", exact_invariants),
        ("moment agreement", moment_agreement),
        ("MGF closed form vs ODE oracle", mgf_vs_oracle),
        ("empirical MGF", empirical_mgf),
        ("transport PDE residual", pde_residual_order),
        ("characteristic ODE", characteristic_ode_drift_uses_c_not_s),
        ("gamma limit of W", gamma_limit),
        ("gamma limit of B and total count", blue_limit_and_total),
        ("martingale transform", martingale),
        ("L1 bound", l1),
        ("determinism", determinism),
    ];
    let mut shared = Shared::default();
    let mut summary = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run(&mut shared);
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        let line = format!("criterion {:>2}: {verdict}  {name} ({:.1}s)", k + 1, start.elapsed().as_secs_f64());
        println!("{line}");
        for detail in &outcome.lines {
            println!("{detail}");
        }
        summary.push((line, outcome.passed));
    }
    println!("\nsummary");
    for (line, _) in &summary {
        println!("{line}");
    }
    let failed = summary.iter().filter(|(_, ok)| !ok).count();
    println!("{} of {} criteria passed", summary.len() - failed, summary.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
