//! Sample statistics used by the checks. All reductions run sequentially in
//! slice order so results are bit-reproducible.

/// Moment summary of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Fourth central moment (biased, `1/n`).
    pub m4: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let (mut m2, mut m4) = (0.0, 0.0);
        for &x in values {
            let d = x - mean;
            let d2 = d * d;
            m2 += d2;
            m4 += d2 * d2;
        }
        let variance = if n > 1 { m2 / (nf - 1.0) } else { 0.0 };
        Self {
            n,
            mean,
            variance,
            m4: m4 / nf,
        }
    }

    pub fn se_mean(&self) -> f64 {
        (self.variance / self.n as f64).sqrt()
    }

    /// Standard error of the sample variance:
    /// `sqrt((m4 − (n−3)/(n−1) · s⁴) / n)`.
    pub fn se_variance(&self) -> f64 {
        let n = self.n as f64;
        if self.n < 4 {
            return f64::INFINITY;
        }
        let s4 = self.variance * self.variance;
        ((self.m4 - (n - 3.0) / (n - 1.0) * s4).max(0.0) / n).sqrt()
    }
}

/// `|estimate − target| / se`, with `se = 0` meaning an exact comparison.
pub fn z_score(estimate: f64, target: f64, se: f64) -> f64 {
    let gap = (estimate - target).abs();
    if se > 0.0 {
        gap / se
    } else if gap <= 1e-12 * target.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Kolmogorov–Smirnov distance `sup_x |F_n(x) − F(x)|` against a continuous
/// reference CDF. Ties in the sample are handled by the usual one-sided
/// differences at each order statistic.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// SplitMix64 finalizer, used to derive independent per-check seeds from the
/// master seed.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn derive_seed(master: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ tag.wrapping_mul(0xD6E8_FEB8_6659_FD93)).wrapping_add(index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_small_sample() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        // central deviations ±1.5, ±0.5
        assert!((s.m4 - (2.0 * 1.5f64.powi(4) + 2.0 * 0.5f64.powi(4)) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn z_score_handles_zero_se() {
        assert_eq!(z_score(3.0, 3.0, 0.0), 0.0);
        assert!(z_score(3.0, 4.0, 0.0).is_infinite());
        assert_eq!(z_score(5.0, 3.0, 0.5), 4.0);
    }

    #[test]
    fn ks_of_uniform_grid() {
        // Midpoints of n cells: D = 1/(2n) against the uniform CDF.
        let n = 10;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.05).abs() < 1e-15);
    }

    #[test]
    fn ks_with_ties() {
        // All mass at 0.5: F_n jumps 0 → 1 there, D = 0.5 against uniform.
        let d = ks_statistic(&[0.5; 8], |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(42, 1, 0);
        assert_ne!(a, derive_seed(42, 1, 1));
        assert_ne!(a, derive_seed(42, 2, 0));
        assert_ne!(a, derive_seed(43, 1, 0));
        assert_eq!(a, derive_seed(42, 1, 0));
    }
}
