//! Gauss-Legendre panel quadrature.
//!
//! Nodes and weights come from Newton iteration on the Legendre recurrence;
//! the panel count doubles until two successive refinements agree.

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess for the i-th root of P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (p0 - x * p1) / (1.0 - x * x);
    (p1, d)
}

/// Fixed-panel integral of `f` over [a, b]: `panels` panels of an
/// `n_points` Gauss-Legendre rule each.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize, n_points: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n_points);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            acc += w * f(mid + half * x);
        }
        total += acc * half;
    }
    total
}

/// Panel-doubling integral of `f` over [a, b]: refines until two successive
/// levels agree to `tol` (absolute, relative to max(1, |value|)).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const POINTS: usize = 20;
    const MAX_PANELS: usize = 1024;
    let mut panels = 4;
    let mut prev = integrate_panels(f, a, b, panels, POINTS);
    loop {
        panels *= 2;
        let next = integrate_panels(f, a, b, panels, POINTS);
        let err = (next - prev).abs();
        if err <= tol * next.abs().max(1.0) {
            return Ok(next);
        }
        if panels >= MAX_PANELS {
            return Err(Error::Quadrature {
                achieved: err,
                requested: tol,
            });
        }
        prev = next;
    }
}
