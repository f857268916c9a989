use crate::model::{ModelParams, UrnState};

/// `e^{−tB}` with `B = Aᵀ = [[−a, a], [−a, a]]`. Since `B² = 0` the series
/// stops after the linear term: `e^{−tB} = I − tB = [[1+at, −at], [at, 1−at]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartingaleTransform {
    a: f64,
}

impl MartingaleTransform {
    pub fn new(a: u64) -> Self {
        Self { a: a as f64 }
    }

    /// `B = Aᵀ`.
    pub fn generator(&self) -> [[f64; 2]; 2] {
        let a = self.a;
        [[-a, a], [-a, a]]
    }

    pub fn matrix(&self, t: f64) -> [[f64; 2]; 2] {
        let at = self.a * t;
        [[1.0 + at, -at], [at, 1.0 - at]]
    }

    /// `e^{−tB} (w, b)ᵀ` by matrix-vector product.
    pub fn apply(&self, t: f64, w: f64, b: f64) -> (f64, f64) {
        let m = self.matrix(t);
        (m[0][0] * w + m[0][1] * b, m[1][0] * w + m[1][1] * b)
    }
}

/// `e^{−tB} X(t)` in row form: `(W − aΔ't, B − aΔ't)` with `Δ' = B − W`
/// taken from the state itself.
pub fn martingale_transform(params: &ModelParams, t: f64, state: &UrnState) -> (f64, f64) {
    let a = params.a() as f64;
    let shift = a * state.differential() as f64 * t;
    (state.white as f64 - shift, state.blue as f64 - shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matmul(x: [[f64; 2]; 2], y: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        out
    }

    #[test]
    fn generator_is_nilpotent() {
        let m = MartingaleTransform::new(3);
        assert_eq!(matmul(m.generator(), m.generator()), [[0.0; 2]; 2]);
    }

    #[test]
    fn matrix_matches_truncated_series() {
        let m = MartingaleTransform::new(2);
        let b = m.generator();
        for &t in &[0.0, 0.5, 3.0] {
            // Σ (−tB)^k / k! with 12 terms; only k ≤ 1 survive.
            let mut term = [[1.0, 0.0], [0.0, 1.0]];
            let mut sum = term;
            for k in 1..12 {
                term = matmul(term, b);
                let f = (-t) / k as f64;
                for row in term.iter_mut() {
                    for x in row.iter_mut() {
                        *x *= f;
                    }
                }
                for i in 0..2 {
                    for j in 0..2 {
                        sum[i][j] += term[i][j];
                    }
                }
            }
            assert_eq!(sum, m.matrix(t));
        }
    }

    #[test]
    fn group_and_additivity() {
        let m = MartingaleTransform::new(2);
        let id = [[1.0, 0.0], [0.0, 1.0]];
        for &(s, t) in &[(0.5, 1.25), (2.0, 3.0), (-1.0, 4.0)] {
            assert_eq!(matmul(m.matrix(t), m.matrix(-t)), id);
            let (ms, mt, mst) = (m.matrix(s), m.matrix(t), m.matrix(s + t));
            for i in 0..2 {
                for j in 0..2 {
                    assert!((ms[i][j] + mt[i][j] - id[i][j] - mst[i][j]).abs() < 1e-12);
                }
            }
            let prod = matmul(ms, mt);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((prod[i][j] - mst[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn transform_examples() {
        let params = ModelParams::new(1, 1, 0).unwrap();
        let s = UrnState::new(3, 4, 2.0);
        assert_eq!(martingale_transform(&params, 0.0, &s), (3.0, 4.0));
        assert_eq!(martingale_transform(&params, 2.0, &s), (1.0, 2.0));
        assert_eq!(MartingaleTransform::new(1).apply(2.0, 3.0, 4.0), (1.0, 2.0));
    }

    #[test]
    fn row_form_matches_matrix_product() {
        let params = ModelParams::new(2, 3, 4).unwrap();
        let m = MartingaleTransform::new(2);
        for &(w, t) in &[(0u64, 0.7), (4, 1.3), (40, 12.0), (1000, 0.01)] {
            let s = UrnState::new(w, w + 3, t);
            let (x, y) = martingale_transform(&params, t, &s);
            let (px, py) = m.apply(t, w as f64, (w + 3) as f64);
            assert!((x - px).abs() <= 1e-12 * px.abs().max(1.0));
            assert!((y - py).abs() <= 1e-12 * py.abs().max(1.0));
            assert_eq!(y - x, 3.0);
        }
    }
}
