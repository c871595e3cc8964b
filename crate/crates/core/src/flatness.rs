//! Constructive core: series denominators, the series solution and its
//! boundary trace (the control), Gevrey envelope fitting, and assembly of
//! the complete control signal from an eigenbasis and initial datum.
//!
//! The controlled solution is the power series
//!
//! ```text
//! f(t,x) = sum_k y^(k)(t) (x^{1-a/2})^{2k} / d_k,
//! d_k    = (2-a)^{2k} k! prod_{j=1}^{k} (j + nu),
//! u(t)   = f(t,1),
//! ```
//!
//! with the flat output `y = phi_s((t-tau)/(T-tau)) * Y(t)` switched on
//! after the waiting time.

use crate::error::{Error, Result};
use crate::jets::{bump_jet, leibniz_derivatives};
use crate::specfun::ln_gamma;
use crate::spectral::{flat_output_derivs, EigenBasis, ModelParams, SpectralCoeffs};
use serde::Serialize;

/// Log-space series denominators `log d_k`, k = 0..N.
///
/// `y^(k)` grows like `(k!)^s` while `d_k` grows like `(k!)^2`; combining
/// them in log space with sign tracking avoids the intermediate over- and
/// underflow both would hit separately near k ~ 150.
#[derive(Debug, Clone)]
pub struct SeriesDenominators {
    alpha: f64,
    nu: f64,
    log_d: Vec<f64>,
}

impl SeriesDenominators {
    pub fn new(params: &ModelParams, n_orders: usize) -> Self {
        SeriesDenominators::from_alpha(params.alpha(), n_orders)
    }

    pub fn from_alpha(alpha: f64, n_orders: usize) -> Self {
        let nu = (alpha - 1.0) / (2.0 - alpha);
        let ln_two_minus = (2.0 - alpha).ln();
        let mut log_d = Vec::with_capacity(n_orders + 1);
        let mut acc = 0.0;
        log_d.push(0.0);
        for k in 1..=n_orders {
            let kf = k as f64;
            acc += 2.0 * ln_two_minus + kf.ln() + (kf + nu).ln();
            log_d.push(acc);
        }
        SeriesDenominators { alpha, nu, log_d }
    }

    pub fn log_d(&self) -> &[f64] {
        &self.log_d
    }

    pub fn order(&self) -> usize {
        self.log_d.len() - 1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `log d_k` for arbitrary k, beyond the stored table.
    fn log_d_at(&self, k: f64) -> f64 {
        2.0 * k * (2.0 - self.alpha).ln() + ln_gamma(k + 1.0) + ln_gamma(k + 1.0 + self.nu)
            - ln_gamma(1.0 + self.nu)
    }
}

/// Boundary trace of the series solution: `u = sum_k y^(k) / d_k`.
pub fn control_value(y_derivs: &[f64], den: &SeriesDenominators) -> Result<f64> {
    solution_value(y_derivs, den, 1.0)
}

/// Pointwise series solution `f(t,x) = sum_k y^(k)(t) w^{2k} / d_k` with
/// `w = x^{1-a/2}`; x = 1 is the control value (same code path).
pub fn solution_value(y_derivs: &[f64], den: &SeriesDenominators, x: f64) -> Result<f64> {
    if y_derivs.len() > den.log_d.len() {
        return Err(Error::OrderMismatch {
            left: y_derivs.len(),
            right: den.log_d.len(),
        });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("solution point x = {x} outside [0,1]")));
    }
    let ln_w2 = if x == 1.0 {
        0.0
    } else if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        (2.0 - den.alpha) * x.ln()
    };
    let mut acc = 0.0;
    let mut comp = 0.0;
    for (k, &yk) in y_derivs.iter().enumerate() {
        if !yk.is_finite() {
            return Err(Error::NonFinite(format!("derivative y^({k})")));
        }
        if yk == 0.0 {
            continue;
        }
        let term = if k == 0 {
            yk
        } else if ln_w2 == f64::NEG_INFINITY {
            continue; // x = 0: only the k = 0 term survives
        } else {
            yk.signum() * (yk.abs().ln() + k as f64 * ln_w2 - den.log_d[k]).exp()
        };
        // Neumaier-compensated accumulation
        let t = acc + term;
        comp += if acc.abs() >= term.abs() {
            (acc - t) + term
        } else {
            (term - t) + acc
        };
        acc = t;
    }
    Ok(acc + comp)
}

/// Empirical Gevrey envelope `|y^(n)(t)| <= M (n!)^s / R^n` fitted to a
/// derivative stack.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GevreyFit {
    pub m: f64,
    pub r: f64,
    pub s: f64,
}

impl GevreyFit {
    /// Least squares of `log sup_t |y^(n)| - s log n!` against `log M - n log R`,
    /// then M raised so the bound majorises every sample (an envelope, not
    /// just a regression).
    pub fn fit(stacks: &[&[f64]], s: f64) -> GevreyFit {
        let n_max = stacks.iter().map(|st| st.len()).max().unwrap_or(0);
        if n_max == 0 {
            return GevreyFit { m: 0.0, r: 1.0, s };
        }
        let mut sup = vec![0.0f64; n_max];
        for stack in stacks {
            for (n, v) in stack.iter().enumerate() {
                sup[n] = sup[n].max(v.abs());
            }
        }
        // z_n = ln sup_n - s ln n!; regress z_n = ln M - n ln R
        let mut pts = Vec::new();
        let mut lnfact = 0.0;
        for (n, &e) in sup.iter().enumerate() {
            if n >= 2 {
                lnfact += (n as f64).ln();
            }
            if e > 0.0 {
                pts.push((n as f64, e.ln() - s * lnfact));
            }
        }
        if pts.len() < 2 {
            let m = sup[0].max(0.0);
            return GevreyFit { m, r: 1.0, s };
        }
        let n_pts = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n_pts * sxy - sx * sy) / (n_pts * sxx - sx * sx);
        let mut ln_m = (sy - slope * sx) / n_pts;
        let ln_r = -slope;
        // raise to an envelope
        let excess = pts
            .iter()
            .map(|&(n, z)| z - (ln_m - n * ln_r))
            .fold(f64::NEG_INFINITY, f64::max);
        ln_m += excess.max(0.0);
        GevreyFit { m: ln_m.exp(), r: ln_r.exp(), s }
    }

    /// `ln` of the certified bound on |y^(n)|.
    pub fn ln_bound(&self, n: usize) -> f64 {
        if self.m == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.m.ln() + self.s * ln_gamma(n as f64 + 1.0) - n as f64 * self.r.ln()
    }
}

/// Bound on the discarded series tail `sum_{k>N} |y^(k)| / d_k` under the
/// fitted envelope, by log-sum-exp. The bound is loose (it inherits the
/// growth of the Gevrey certificate sum) but finite for s < 2; `inf` is
/// returned if the term hump has not passed by the iteration cap.
pub fn control_tail_bound(fit: &GevreyFit, den: &SeriesDenominators, n_trunc: usize) -> f64 {
    if fit.m == 0.0 {
        return 0.0;
    }
    const CAP: usize = 200_000;
    let mut ln_terms: Vec<f64> = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    let mut k = n_trunc + 1;
    loop {
        let lt = fit.ln_bound(k) - den.log_d_at(k as f64);
        ln_terms.push(lt);
        peak = peak.max(lt);
        if lt < peak - 45.0 {
            break; // decayed well past the hump
        }
        k += 1;
        if k > CAP {
            return f64::INFINITY;
        }
    }
    let sum: f64 = ln_terms.iter().map(|lt| (lt - peak).exp()).sum();
    (peak + sum.ln()).exp()
}

/// Complete boundary control on a time grid: samples, per-sample derivative
/// stacks of the flat output, and the fitted Gevrey envelope.
#[derive(Debug, Clone)]
pub struct ControlSignal {
    times: Vec<f64>,
    u: Vec<f64>,
    y_stack: Vec<Vec<f64>>,
    gevrey_fit: GevreyFit,
    n_orders: usize,
    tau: f64,
    t_final: f64,
    tail_bound: f64,
}

impl ControlSignal {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn samples(&self) -> &[f64] {
        &self.u
    }

    pub fn value(&self, i: usize) -> f64 {
        self.u[i]
    }

    pub fn y_stack(&self) -> &[Vec<f64>] {
        &self.y_stack
    }

    pub fn gevrey_fit(&self) -> GevreyFit {
        self.gevrey_fit
    }

    pub fn n_orders(&self) -> usize {
        self.n_orders
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Uniform bound on the discarded series tail under the fitted envelope.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// u'(t) at every grid node by centred differences on the grid itself:
    /// fourth order where four uniform neighbours exist, second order next
    /// to the window edges, and exact zeros at t <= tau and t = T where the
    /// control is flat.
    pub fn derivative_samples(&self) -> Vec<f64> {
        let n = self.times.len();
        let mut out = vec![0.0; n];
        let last = n - 1;
        for i in 0..n {
            let t = self.times[i];
            if t <= self.tau || i == last {
                continue; // identically zero, or flat at T
            }
            let h = self.times[i + 1] - self.times[i];
            let uniform4 = i >= 2 && i + 2 <= last && grid_uniform(&self.times[i - 2..=i + 2], h);
            out[i] = if uniform4 {
                (self.u[i - 2] - 8.0 * self.u[i - 1] + 8.0 * self.u[i + 1] - self.u[i + 2])
                    / (12.0 * h)
            } else {
                (self.u[i + 1] - self.u[i - 1]) / (self.times[i + 1] - self.times[i - 1])
            };
        }
        out
    }

    /// Write `t,u` rows with 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,u")?;
        for (t, u) in self.times.iter().zip(&self.u) {
            writeln!(w, "{t:.16e},{u:.16e}")?;
        }
        Ok(())
    }

    /// JSON sidecar with the fit and truncation metadata.
    pub fn sidecar(&self, mode_count: usize) -> ControlSidecar {
        ControlSidecar {
            gevrey_fit: self.gevrey_fit,
            n_orders: self.n_orders,
            mode_count,
            tail_bound: self.tail_bound,
            tau: self.tau,
            t_final: self.t_final,
        }
    }
}

fn grid_uniform(times: &[f64], h: f64) -> bool {
    times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
}

/// Sidecar metadata exported next to the control CSV.
#[derive(Debug, Clone, Serialize)]
pub struct ControlSidecar {
    pub gevrey_fit: GevreyFit,
    pub n_orders: usize,
    pub mode_count: usize,
    pub tail_bound: f64,
    pub tau: f64,
    pub t_final: f64,
}

/// Assemble the Theorem-style control on `times`:
/// zero up to the waiting time, then the boundary trace of the series built
/// from `y = phi_s((t-tau)/(T-tau)) Y(t)`.
///
/// The grid must start at 0, end at T, and contain tau exactly.
pub fn assemble_control(
    basis: &EigenBasis,
    coeffs: &SpectralCoeffs,
    n_orders: usize,
    times: &[f64],
) -> Result<ControlSignal> {
    let params = basis.params();
    let tau = params.tau();
    let t_final = params.t_final();
    validate_grid(times, tau, t_final)?;
    let den = SeriesDenominators::new(params, n_orders);
    let s = params.gevrey_order();
    let scale = 1.0 / (t_final - tau);

    let mut u = Vec::with_capacity(times.len());
    let mut stacks = Vec::with_capacity(times.len());
    for &t in times {
        if t <= tau {
            u.push(0.0);
            stacks.push(vec![0.0; n_orders + 1]);
            continue;
        }
        let sigma = (t - tau) * scale;
        let phi_sigma = bump_jet(s, sigma, n_orders)?;
        let phi_t = phi_sigma.affine_compose(scale, t);
        let y_derivs = flat_output_derivs(basis, coeffs, t, n_orders)?;
        let stack = leibniz_derivatives(&phi_t, &y_derivs.values)?;
        u.push(control_value(&stack, &den)?);
        stacks.push(stack);
    }

    let active: Vec<&[f64]> = times
        .iter()
        .zip(&stacks)
        .filter(|(t, _)| **t > tau)
        .map(|(_, st)| st.as_slice())
        .collect();
    let gevrey_fit = GevreyFit::fit(&active, s);
    let tail_bound = control_tail_bound(&gevrey_fit, &den, n_orders);

    Ok(ControlSignal {
        times: times.to_vec(),
        u,
        y_stack: stacks,
        gevrey_fit,
        n_orders,
        tau,
        t_final,
        tail_bound,
    })
}

fn validate_grid(times: &[f64], tau: f64, t_final: f64) -> Result<()> {
    if times.len() < 3 {
        return Err(Error::Grid("control grid needs at least three nodes".into()));
    }
    if times[0] != 0.0 {
        return Err(Error::Grid(format!("grid must start at 0, got {}", times[0])));
    }
    if *times.last().unwrap() != t_final {
        return Err(Error::Grid(format!(
            "grid must end at T = {t_final}, got {}",
            times.last().unwrap()
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid("grid must be strictly increasing".into()));
    }
    if !times.contains(&tau) {
        return Err(Error::Grid(format!("grid must contain tau = {tau}")));
    }
    Ok(())
}
