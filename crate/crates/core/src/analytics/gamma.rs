use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::special::regularized_lower_gamma;

/// Gamma law in shape/scale form: MGF `(1 − scale·x)^{−shape}`, mean
/// `shape·scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaLaw {
    pub shape: f64,
    pub scale: f64,
}

impl GammaLaw {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite() && scale > 0.0 && scale.is_finite()) {
            return Err(Error::OutOfDomain(format!(
                "gamma parameters must be positive and finite (shape={shape}, scale={scale})"
            )));
        }
        Ok(Self { shape, scale })
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            regularized_lower_gamma(self.shape, x / self.scale)
        }
    }

    /// Defined for `x < 1/scale`.
    pub fn mgf(&self, x: f64) -> Result<f64> {
        let base = 1.0 - self.scale * x;
        if !(base > 0.0) {
            return Err(Error::OutOfDomain(format!(
                "gamma MGF diverges at x = {x} (needs x < {})",
                1.0 / self.scale
            )));
        }
        Ok((-self.shape * base.ln()).exp())
    }

    /// Inverse CDF by bracketing and bisection. `p` must lie in `[0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::OutOfDomain(format!("quantile level {p} not in [0, 1)")));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        let mut lo = 0.0;
        let mut hi = self.mean() + 10.0 * self.variance().sqrt();
        while self.cdf(hi) < p {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Limit law of `W(t)/t`: `Gamma(shape = Δ/a, scale = a²)`.
pub fn limit_law(params: &ModelParams) -> GammaLaw {
    let (a, delta, _) = params.as_f64();
    GammaLaw {
        shape: delta / a,
        scale: a * a,
    }
}

pub fn gamma_cdf(law: &GammaLaw, x: f64) -> f64 {
    law.cdf(x)
}

pub fn gamma_mgf(law: &GammaLaw, x: f64) -> Result<f64> {
    law.mgf(x)
}
