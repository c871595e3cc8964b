//! Monotone cubic interpolation (Fritsch-Carlson) for sampled initial data.

use crate::error::{Error, Result};

/// C1 piecewise-cubic interpolant that preserves the monotonicity of the
/// data between nodes. Evaluation outside the node range clamps to the
/// boundary values.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InitialDatum(format!(
                "{} x-values vs {} samples",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InitialDatum("need at least two samples".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InitialDatum("x-values must be strictly increasing".into()));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InitialDatum("samples must be finite".into()));
        }
        let n = xs.len();
        let mut deltas = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            deltas.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }
        let mut slopes = vec![0.0; n];
        slopes[0] = deltas[0];
        slopes[n - 1] = deltas[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if deltas[i - 1] * deltas[i] > 0.0 {
                // harmonic mean weighted by interval lengths
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                (w1 + w2) / (w1 / deltas[i - 1] + w2 / deltas[i])
            } else {
                0.0
            };
        }
        // Fritsch-Carlson limiter
        for i in 0..n - 1 {
            if deltas[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
            } else {
                let a = slopes[i] / deltas[i];
                let b = slopes[i + 1] / deltas[i];
                let s = (a * a + b * b).sqrt();
                if s > 3.0 {
                    slopes[i] = 3.0 * a / s * deltas[i];
                    slopes[i + 1] = 3.0 * b / s * deltas[i];
                }
            }
        }
        Ok(MonotoneCubic { xs, ys, slopes })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reproduces_nodes() {
        let xs = vec![0.0, 0.3, 0.7, 1.0];
        let ys = vec![1.0, 0.4, 0.9, 0.2];
        let c = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_relative_eq!(c.eval(*x), *y, max_relative = 1e-14);
        }
    }

    #[test]
    fn stays_monotone_on_monotone_data() {
        let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let c = MonotoneCubic::new(xs, ys).unwrap();
        let mut prev = c.eval(0.0);
        for i in 1..=400 {
            let v = c.eval(i as f64 / 400.0);
            assert!(v >= prev - 1e-12, "non-monotone at i = {i}");
            prev = v;
        }
    }

    #[test]
    fn rejects_unsorted_input() {
        assert!(MonotoneCubic::new(vec![0.0, 0.5, 0.5], vec![1.0, 2.0, 3.0]).is_err());
        assert!(MonotoneCubic::new(vec![0.0], vec![1.0]).is_err());
    }
}
