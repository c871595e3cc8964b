//! Independent verification that the assembled control steers the datum to
//! zero: a modal Galerkin solver built on the boundary lifting
//! `f = g + u(t) x^2`, and a conservative finite-volume discretisation of
//! the degenerate operator itself. The two must agree.

use crate::error::{Error, Result};
use crate::flatness::ControlSignal;
use crate::spectral::{project_callable, EigenBasis, ModelParams, SpectralCoeffs};

/// Spatial mesh with nodal values at one time.
#[derive(Debug, Clone)]
pub struct GridState {
    pub mesh: Vec<f64>,
    pub values: Vec<f64>,
    pub time: f64,
}

/// Trapezoidal L2 norm on the state's mesh.
pub fn l2_norm(state: &GridState) -> f64 {
    let mut acc = 0.0;
    for i in 0..state.mesh.len() - 1 {
        let h = state.mesh[i + 1] - state.mesh[i];
        let a = state.values[i];
        let b = state.values[i + 1];
        acc += 0.5 * h * (a * a + b * b);
    }
    acc.sqrt()
}

/// Modal state of the lifted unknown `g = f - u(t) x^2`.
#[derive(Debug, Clone)]
pub struct LiftedState {
    pub time: f64,
    pub g: Vec<f64>,
    pub u_now: f64,
    pub u_prime_now: f64,
}

/// Galerkin trajectory: lifted states at the requested output times plus the
/// projections needed to reconstruct and measure the physical solution.
#[derive(Debug, Clone)]
pub struct GalerkinTrajectory {
    pub states: Vec<LiftedState>,
    /// <x^2, phi_k>
    pub theta_proj: Vec<f64>,
    /// |x^2|_{L2}^2 = 1/5
    theta_norm_sq: f64,
}

impl GalerkinTrajectory {
    /// Physical solution `f(t, x) = sum_k g_k phi_k(x) + u(t) x^2`.
    pub fn reconstruct(&self, basis: &EigenBasis, state: &LiftedState, x: f64) -> f64 {
        let mut acc = state.u_now * x * x;
        for (k, g) in state.g.iter().enumerate() {
            acc += g * basis.eigenfunction(k + 1, x);
        }
        acc
    }

    /// L2 norm of the physical solution by Parseval on the lifted modes:
    /// `|f|^2 = sum g_k^2 + 2 u sum g_k <theta, phi_k> + u^2 |theta|^2`.
    pub fn l2_norm(&self, state: &LiftedState) -> f64 {
        let gg: f64 = state.g.iter().map(|g| g * g).sum();
        let gtheta: f64 = state
            .g
            .iter()
            .zip(&self.theta_proj)
            .map(|(g, p)| g * p)
            .sum();
        let u = state.u_now;
        (gg + 2.0 * u * gtheta + u * u * self.theta_norm_sq).max(0.0).sqrt()
    }
}

/// psi1 = (1 - e^{-z}) / lambda and psi2 = (dt - psi1) / lambda for the
/// exponential-integrator step, with the series branch guarding the
/// cancellation at small lambda * dt.
fn phi_weights(lambda: f64, dt: f64) -> (f64, f64) {
    let z = lambda * dt;
    if z < 1e-3 {
        // psi1 = dt (1 - z/2 + z^2/6 - z^3/24), psi2 = dt^2 (1/2 - z/6 + z^2/24)
        let psi1 = dt * (1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0);
        let psi2 = dt * dt * (0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0);
        (psi1, psi2)
    } else {
        let psi1 = -(-z).exp_m1() / lambda;
        let psi2 = (dt - psi1) / lambda;
        (psi1, psi2)
    }
}

/// Integrate the lifted modal system
///
/// ```text
/// g_k' = -lambda_k g_k + H_k(t),
/// H_k  = -u'(t) <theta, phi_k> - u(t) <A theta, phi_k>,   theta = x^2,
/// A theta = -2 (alpha + 1) x^alpha,
/// ```
///
/// marching node-to-node on the control grid with the exact exponential
/// and the source piecewise linear on each control interval. Output times
/// must be nodes of the control grid (resample the control rather than
/// interpolating it).
pub fn galerkin_solve(
    basis: &EigenBasis,
    coeffs: &SpectralCoeffs,
    control: &ControlSignal,
    output_times: &[f64],
) -> Result<GalerkinTrajectory> {
    let times = control.times();
    let u = control.samples();
    let du = control.derivative_samples();
    let k_modes = basis.mode_count().min(coeffs.mode_count());

    // output times must match control nodes exactly
    let mut out_idx = Vec::with_capacity(output_times.len());
    let mut cursor = 0usize;
    for &t in output_times {
        while cursor < times.len() && times[cursor] < t {
            cursor += 1;
        }
        if cursor >= times.len() || times[cursor] != t {
            return Err(Error::Grid(format!(
                "output time {t} is not a control-grid node; resample the control"
            )));
        }
        out_idx.push(cursor);
    }

    let alpha = basis.params().alpha();
    let theta_proj = project_callable(basis, &|x| x * x)?;
    let atheta_proj: Vec<f64> = project_callable(basis, &|x: f64| x.powf(alpha))?
        .into_iter()
        .map(|v| -2.0 * (alpha + 1.0) * v)
        .collect();

    let source = |i: usize, k: usize| -> f64 {
        -du[i] * theta_proj[k] - u[i] * atheta_proj[k]
    };

    let mut g: Vec<f64> = (1..=k_modes).map(|k| coeffs.coeff(k)).collect();
    let mut states = Vec::with_capacity(output_times.len());
    let mut next_out = 0usize;
    for i in 0..times.len() {
        if next_out < out_idx.len() && out_idx[next_out] == i {
            states.push(LiftedState {
                time: times[i],
                g: g.clone(),
                u_now: u[i],
                u_prime_now: du[i],
            });
            next_out += 1;
        }
        if i + 1 == times.len() {
            break;
        }
        let dt = times[i + 1] - times[i];
        for (k, gk) in g.iter_mut().enumerate() {
            let lam = basis.lambda(k + 1);
            let h0 = source(i, k);
            let h1 = source(i + 1, k);
            let (psi1, psi2) = phi_weights(lam, dt);
            let slope = (h1 - h0) / dt;
            *gk = (-lam * dt).exp() * *gk + h0 * psi1 + slope * psi2;
        }
    }
    Ok(GalerkinTrajectory {
        states,
        theta_proj,
        theta_norm_sq: 0.2,
    })
}

/// Graded mesh `x_i = (i/M)^{2/(2-alpha)}`: the coordinate in which the
/// eigenfunctions oscillate uniformly, made uniform.
pub fn graded_mesh(params: &ModelParams, cells: usize) -> Vec<f64> {
    let power = 2.0 / (2.0 - params.alpha());
    (0..=cells)
        .map(|i| (i as f64 / cells as f64).powf(power))
        .collect()
}

/// Finite-volume trajectory: full state at checkpoint times, L2 norm at
/// every step.
#[derive(Debug, Clone)]
pub struct FvTrajectory {
    pub checkpoints: Vec<GridState>,
    /// (t, |f(t)|_L2) at every time node.
    pub norms: Vec<(f64, f64)>,
}

/// Conservative finite-volume solve of the degenerate equation with
/// Crank-Nicolson time stepping on the control's own grid.
///
/// Interface fluxes `F_{i+1/2} = x_{i+1/2}^alpha (f_{i+1}-f_i)/(x_{i+1}-x_i)`,
/// zero flux at the degenerate end, Dirichlet `f_M = u(t)` imposed strongly.
pub fn fv_solve(
    params: &ModelParams,
    f0: &dyn Fn(f64) -> f64,
    control: &ControlSignal,
    mesh: &[f64],
    checkpoint_times: &[f64],
) -> Result<FvTrajectory> {
    let m = mesh.len() - 1;
    if m < 3 {
        return Err(Error::Grid("finite-volume mesh needs at least 3 cells".into()));
    }
    if mesh[0] != 0.0 || mesh[m] != 1.0 || mesh.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid(
            "mesh must increase strictly from 0 to 1".into(),
        ));
    }
    let times = control.times();
    let u = control.samples();
    let alpha = params.alpha();

    // cell widths around nodes 0..M-1 (node M is the Dirichlet boundary)
    let midpoint = |i: usize| 0.5 * (mesh[i] + mesh[i + 1]);
    let mut width = vec![0.0; m];
    width[0] = midpoint(0);
    for (i, w) in width.iter_mut().enumerate().skip(1) {
        *w = midpoint(i) - midpoint(i - 1);
    }
    // transmissibilities c_i = x_{i+1/2}^alpha / (x_{i+1} - x_i)
    let trans: Vec<f64> = (0..m)
        .map(|i| midpoint(i).powf(alpha) / (mesh[i + 1] - mesh[i]))
        .collect();

    let mut f: Vec<f64> = mesh[..m].iter().map(|&x| f0(x)).collect();
    let mut boundary = u[0];

    let mut checkpoint_iter = checkpoint_times.iter().peekable();
    let mut checkpoints = Vec::new();
    let mut norms = Vec::with_capacity(times.len());

    let full_state = |f: &[f64], boundary: f64, t: f64| -> GridState {
        let mut values = f.to_vec();
        values.push(boundary);
        GridState {
            mesh: mesh.to_vec(),
            values,
            time: t,
        }
    };

    // scratch for the Thomas solve
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];

    for i in 0..times.len() {
        let t = times[i];
        let state = full_state(&f, boundary, t);
        norms.push((t, l2_norm(&state)));
        if let Some(&&ct) = checkpoint_iter.peek() {
            if ct == t {
                checkpoints.push(state);
                checkpoint_iter.next();
            }
        }
        if i + 1 == times.len() {
            break;
        }

        let dt = times[i + 1] - times[i];
        let u_new = u[i + 1];
        let half = 0.5 * dt;
        // (L f)_j = c_j (f_{j+1} - f_j) - c_{j-1} (f_j - f_{j-1}), zero flux at j = 0
        for j in 0..m {
            let c_left = if j == 0 { 0.0 } else { trans[j - 1] };
            let c_right = trans[j];
            let f_left = if j == 0 { 0.0 } else { f[j - 1] };
            let f_right = if j + 1 < m { f[j + 1] } else { boundary };
            let lf = c_right * (f_right - f[j]) - c_left * (f[j] - f_left);
            lower[j] = -half * c_left;
            diag[j] = width[j] + half * (c_left + c_right);
            upper[j] = -half * c_right;
            rhs[j] = width[j] * f[j] + half * lf;
        }
        // Dirichlet value at the new level enters the last row
        rhs[m - 1] += half * trans[m - 1] * u_new;

        thomas(&lower, &mut diag, &upper, &mut rhs)?;
        f.copy_from_slice(&rhs);
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "finite-volume state after the step to t = {}",
                times[i + 1]
            )));
        }
        boundary = u_new;
    }
    Ok(FvTrajectory { checkpoints, norms })
}

/// Tridiagonal solve (Thomas algorithm); `diag` and `rhs` are consumed as
/// scratch, the solution lands in `rhs`.
fn thomas(lower: &[f64], diag: &mut [f64], upper: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = rhs.len();
    for i in 1..n {
        if diag[i - 1] == 0.0 {
            return Err(Error::NonFinite("singular tridiagonal system".into()));
        }
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if diag[n - 1] == 0.0 {
        return Err(Error::NonFinite("singular tridiagonal system".into()));
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
    Ok(())
}

/// One row of the cross-validation report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckpointReport {
    pub t: f64,
    pub galerkin_l2: f64,
    pub fv_l2: f64,
    pub discrepancy: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Compare the two trajectories at common checkpoints: the Galerkin
/// reconstruction is evaluated on the finite-volume mesh and the L2 norm of
/// the difference is measured there. A checkpoint passes when the
/// discrepancy stays below `max(1e-3, 5 * fv_error_estimate)`.
pub fn cross_validate(
    basis: &EigenBasis,
    galerkin: &GalerkinTrajectory,
    fv: &FvTrajectory,
    fv_error_estimate: f64,
) -> Result<Vec<CheckpointReport>> {
    let threshold = (5.0 * fv_error_estimate).max(1e-3);
    let mut report = Vec::new();
    for fv_state in &fv.checkpoints {
        let Some(gal_state) = galerkin
            .states
            .iter()
            .find(|s| s.time == fv_state.time)
        else {
            return Err(Error::Grid(format!(
                "no Galerkin state at checkpoint t = {}",
                fv_state.time
            )));
        };
        let diff = GridState {
            mesh: fv_state.mesh.clone(),
            values: fv_state
                .mesh
                .iter()
                .zip(&fv_state.values)
                .map(|(&x, &v)| v - galerkin.reconstruct(basis, gal_state, x))
                .collect(),
            time: fv_state.time,
        };
        let discrepancy = l2_norm(&diff);
        report.push(CheckpointReport {
            t: fv_state.time,
            galerkin_l2: galerkin.l2_norm(gal_state),
            fv_l2: l2_norm(fv_state),
            discrepancy,
            threshold,
            pass: discrepancy <= threshold,
        });
    }
    Ok(report)
}
