//! The MGF `ψ(t, u)`, its characteristic curves, the ODE along them, and
//! finite-difference residuals of the governing transport equation
//!
//! ```text
//! ∂ψ/∂t + (2 − e^{−au} − e^{au}) ∂ψ/∂u + Δ(1 − e^{au}) ψ = 0,   ψ(0, u) = e^{W(0)u}.
//! ```

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Denominators or logarithm arguments at or below this are treated as being
/// on the domain boundary.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// Relative tolerance of the step-doubling check in
/// [`integrate_characteristic_ode`].
pub const ODE_REL_TOL: f64 = 1e-9;

fn out_of_domain(msg: String) -> Error {
    Error::OutOfDomain(msg)
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(out_of_domain(format!("time must be finite and nonnegative, got {t}")))
    }
}

/// `u*(t) = ln(1 + 1/(at)) / a`, the right end of the open interval on which
/// `ψ(t, ·)` is finite. Infinite at `t = 0`.
pub fn mgf_domain_bound(params: &ModelParams, t: f64) -> f64 {
    let a = params.a() as f64;
    if t <= 0.0 {
        f64::INFINITY
    } else {
        (1.0 / (a * t)).ln_1p() / a
    }
}

/// `ln ψ(t, u)`.
pub fn ln_mgf_w(params: &ModelParams, t: f64, u: f64) -> Result<f64> {
    check_time(t)?;
    if !u.is_finite() {
        return Err(out_of_domain(format!("u must be finite, got {u}")));
    }
    let (a, delta, w0) = params.as_f64();
    let g = a * t * (a * u).exp_m1();
    // 1 + at − at·e^{au}
    let lower = 1.0 - g;
    if lower <= BOUNDARY_EPS {
        return Err(out_of_domain(format!(
            "u = {u} is not below the MGF boundary {} at t = {t}",
            mgf_domain_bound(params, t)
        )));
    }
    // e^{au} − at·e^{au} + at, the negated numerator of the W(0) factor.
    let upper = (a * u).exp() - g;
    let ln_lower = (-g).ln_1p();
    Ok(-(delta / a) * ln_lower + (w0 / a) * (upper.ln() - ln_lower))
}

/// `ψ(t, u) = (1 + at − at e^{au})^{−Δ/a} · ((at e^{au} − at − e^{au}) / (at e^{au} − at − 1))^{W(0)/a}`.
///
/// Defined for `u < u*(t)`; see [`mgf_domain_bound`].
pub fn mgf_w(params: &ModelParams, t: f64, u: f64) -> Result<f64> {
    ln_mgf_w(params, t, u).map(f64::exp)
}

/// Joint MGF `φ(t, u, v) = E[e^{uW(t) + vB(t)}] = e^{vΔ} ψ(t, u + v)`.
pub fn joint_mgf(params: &ModelParams, t: f64, u: f64, v: f64) -> Result<f64> {
    let delta = params.delta() as f64;
    Ok((v * delta + ln_mgf_w(params, t, u + v)?).exp())
}

/// Drift of the characteristics, `2 − e^{−ac} − e^{ac}`.
pub fn characteristic_drift(a: u64, c: f64) -> f64 {
    let half = 0.5 * a as f64 * c;
    -4.0 * half.sinh() * half.sinh()
}

/// The characteristic through `(t, u)`, evaluated at `s`:
///
/// ```text
/// C(s) = (1/a) ln[(a(s−t)e^{au} − a(s−t) + e^{au}) / (a(s−t)e^{au} − a(s−t) + 1)]
/// ```
///
/// Solves `C'(s) = 2 − e^{−aC(s)} − e^{aC(s)}` with `C(t) = u`.
pub fn characteristic_curve(params: &ModelParams, t: f64, u: f64, s: f64) -> Result<f64> {
    if !(t.is_finite() && u.is_finite() && s.is_finite()) {
        return Err(out_of_domain(format!(
            "non-finite characteristic argument (t={t}, u={u}, s={s})"
        )));
    }
    let a = params.a() as f64;
    let k = a * (s - t) * (a * u).exp_m1();
    let numerator = (a * u).exp() + k;
    let denominator = 1.0 + k;
    if numerator <= BOUNDARY_EPS || denominator <= BOUNDARY_EPS {
        return Err(out_of_domain(format!(
            "characteristic through (t={t}, u={u}) is undefined at s={s}"
        )));
    }
    // ln(numerator) = au + ln(1 + k e^{-au}), so C(t) = u exactly.
    Ok(u + ((k * (-a * u).exp()).ln_1p() - k.ln_1p()) / a)
}

/// Where the characteristic through `(t, u)` meets `s = 0`.
pub fn characteristic_intercept(params: &ModelParams, t: f64, u: f64) -> Result<f64> {
    characteristic_curve(params, t, u, 0.0)
}

/// Result of integrating the along-characteristic ODE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSolution {
    /// Approximation of `ψ(t, u)` with `steps` RK4 steps.
    pub value: f64,
    /// Step-doubling estimate of the error in `value`.
    pub error_estimate: f64,
    pub steps: usize,
}

/// Fixed-step classical RK4 for `v'(s) = −Δ(1 − e^{aC(s)}) v(s)` on `[0, t]`,
/// started from `v(0) = e^{W(0) C(0)}`. The result approximates `ψ(t, u)`
/// without using its closed form.
pub fn rk4_characteristic(params: &ModelParams, t: f64, u: f64, steps: usize) -> Result<f64> {
    check_time(t)?;
    if steps == 0 {
        return Err(Error::StepCountTooSmall {
            steps,
            estimate: f64::INFINITY,
            tolerance: ODE_REL_TOL,
        });
    }
    if u >= mgf_domain_bound(params, t) {
        return Err(out_of_domain(format!("u = {u} outside the MGF domain at t = {t}")));
    }
    let a = params.a() as f64;
    let delta = params.delta() as f64;
    let w0 = params.w0() as f64;
    let rate = |s: f64| -> Result<f64> {
        let c = characteristic_curve(params, t, u, s)?;
        Ok(delta * (a * c).exp_m1())
    };
    let mut v = (w0 * characteristic_intercept(params, t, u)?).exp();
    if t == 0.0 {
        return Ok(v);
    }
    let h = t / steps as f64;
    let mut r0 = rate(0.0)?;
    for i in 0..steps {
        let s = i as f64 * h;
        let r_mid = rate(s + 0.5 * h)?;
        let r1 = rate(if i + 1 == steps { t } else { s + h })?;
        let k1 = r0 * v;
        let k2 = r_mid * (v + 0.5 * h * k1);
        let k3 = r_mid * (v + 0.5 * h * k2);
        let k4 = r1 * (v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        r0 = r1;
    }
    Ok(v)
}

/// RK4 at `steps` and `2·steps`, with the Richardson error estimate
/// `(16/15)|v_n − v_2n|` for the `steps` result.
pub fn solve_characteristic_ode(
    params: &ModelParams,
    t: f64,
    u: f64,
    steps: usize,
) -> Result<OdeSolution> {
    let coarse = rk4_characteristic(params, t, u, steps)?;
    let fine = rk4_characteristic(params, t, u, 2 * steps)?;
    Ok(OdeSolution {
        value: coarse,
        error_estimate: (coarse - fine).abs() * 16.0 / 15.0,
        steps,
    })
}

/// Numeric oracle for [`mgf_w`]: integrates the ODE along the characteristic
/// and fails with [`Error::StepCountTooSmall`] if the step-doubling estimate
/// exceeds [`ODE_REL_TOL`] relative to the result.
pub fn integrate_characteristic_ode(
    params: &ModelParams,
    t: f64,
    u: f64,
    steps: usize,
) -> Result<f64> {
    let sol = solve_characteristic_ode(params, t, u, steps)?;
    let tolerance = ODE_REL_TOL * sol.value.abs();
    if sol.error_estimate > tolerance {
        return Err(Error::StepCountTooSmall {
            steps,
            estimate: sol.error_estimate,
            tolerance,
        });
    }
    Ok(sol.value)
}

/// Central-difference residual of the reduced transport equation at `(t, u)`.
/// Requires `t ≥ h` and `u + h` inside the MGF domain at `t + h`.
pub fn pde_residual(params: &ModelParams, t: f64, u: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || t - h < 0.0 {
        return Err(out_of_domain(format!("need 0 < h ≤ t, got h = {h}, t = {t}")));
    }
    let psi = |t: f64, u: f64| mgf_w(params, t, u);
    let centre = psi(t, u)?;
    let d_t = (psi(t + h, u)? - psi(t - h, u)?) / (2.0 * h);
    let d_u = (psi(t, u + h)? - psi(t, u - h)?) / (2.0 * h);
    let a = params.a() as f64;
    let delta = params.delta() as f64;
    Ok(d_t + characteristic_drift(params.a(), u) * d_u - delta * (a * u).exp_m1() * centre)
}

/// Central-difference residual of the bivariate equation for the joint MGF,
///
/// ```text
/// ∂φ/∂t + (1 − e^{m₀₀u + m₀₁v}) ∂φ/∂u + (1 − e^{m₁₀u + m₁₁v}) ∂φ/∂v = 0,
/// ```
///
/// with `m` the replacement matrix.
pub fn bivariate_pde_residual(params: &ModelParams, t: f64, u: f64, v: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || t - h < 0.0 {
        return Err(out_of_domain(format!("need 0 < h ≤ t, got h = {h}, t = {t}")));
    }
    let phi = |t: f64, u: f64, v: f64| joint_mgf(params, t, u, v);
    let d_t = (phi(t + h, u, v)? - phi(t - h, u, v)?) / (2.0 * h);
    let d_u = (phi(t, u + h, v)? - phi(t, u - h, v)?) / (2.0 * h);
    let d_v = (phi(t, u, v + h)? - phi(t, u, v - h)?) / (2.0 * h);
    let m = params.replacement_matrix().entries();
    let coef = |row: [i64; 2]| -(row[0] as f64 * u + row[1] as f64 * v).exp_m1();
    Ok(d_t + coef(m[0]) * d_u + coef(m[1]) * d_v)
}
