//! Closed-form results for the constant-differentials process and the
//! numeric oracles that check them.
//!
//! Conventions: `ψ(t, u) = E[e^{u W(t)}]` is the MGF of the white count, and
//! gamma laws are parametrized by shape and *scale*, so `Gamma(k, θ)` has MGF
//! `(1 − θx)^{−k}` and mean `kθ`.

mod gamma;
mod martingale;
mod mgf;

pub use gamma::{gamma_cdf, gamma_mgf, limit_law, GammaLaw};
pub use martingale::{martingale_transform, MartingaleTransform};
pub use mgf::{
    bivariate_pde_residual, characteristic_curve, characteristic_drift,
    characteristic_intercept, integrate_characteristic_ode, joint_mgf, mgf_domain_bound, mgf_w,
    ln_mgf_w, pde_residual, rk4_characteristic, solve_characteristic_ode, OdeSolution,
    BOUNDARY_EPS, ODE_REL_TOL,
};

use crate::model::ModelParams;

/// `E[W(t)] = W(0) + aΔt`.
pub fn mean_w(params: &ModelParams, t: f64) -> f64 {
    let (a, delta, w0) = params.as_f64();
    w0 + a * delta * t
}

/// `E[W²(t)] = W(0)² + (2a²t + 2aΔt)W(0) + a²tΔ(at + Δt + 1)`.
pub fn second_moment_w(params: &ModelParams, t: f64) -> f64 {
    let (a, delta, w0) = params.as_f64();
    w0 * w0 + (2.0 * a * a * t + 2.0 * a * t * delta) * w0 + a * a * t * delta * (a * t + t * delta + 1.0)
}

/// `Var[W(t)] = a²t(2W(0) + Δ + aΔt)`, i.e. `E[W²(t)] − E[W(t)]²`.
///
/// The initial white count enters with weight two: for small `t` the variance
/// is `t · a² · (W(0) + B(0))`, the total jump rate times the squared jump.
pub fn var_w(params: &ModelParams, t: f64) -> f64 {
    let (a, delta, w0) = params.as_f64();
    a * a * t * (2.0 * w0 + delta + a * delta * t)
}

/// `E[X(t)] = e^{tAᵀ} X(0) = (W(0) + aΔt, W(0) + Δ + aΔt)`.
pub fn mean_vector(params: &ModelParams, t: f64) -> (f64, f64) {
    let (_, delta, _) = params.as_f64();
    let w = mean_w(params, t);
    (w, w + delta)
}

/// Upper bound on `E|W(t)/t − aΔ|` from the triangle and Cauchy–Schwarz
/// inequalities: `sqrt(Var W(t)) / t + W(0) / t`.
///
/// Expands to `sqrt(a³Δ + a²(2W(0) + Δ)/t) + W(0)/t`; decreasing in `t` with
/// limit `sqrt(a³Δ)`.
pub fn l1_bound(params: &ModelParams, t: f64) -> f64 {
    let (a, delta, w0) = params.as_f64();
    (a * a * a * delta + a * a * (2.0 * w0 + delta) / t).sqrt() + w0 / t
}
