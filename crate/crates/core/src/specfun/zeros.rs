//! Positive zeros j_{nu,k} of J_nu.
//!
//! Strategy per zero: McMahon-type initial guess, Newton refinement with the
//! derivative, then a sign-change bracket as acceptance check. Whenever the
//! guess or Newton misbehaves (low zeros at large order, mostly) a forward
//! scan in half-pi windows brackets the zero and bisection takes over.

use super::bessel::{j_prime_raw, j_raw, BesselOrder};
use crate::error::{Error, Result};

/// Ordered table of the first `len` positive zeros of J_nu.
#[derive(Debug, Clone)]
pub struct ZeroTable {
    nu: BesselOrder,
    zeros: Vec<f64>,
}

impl ZeroTable {
    pub fn order(&self) -> BesselOrder {
        self.nu
    }

    /// k-th zero, 1-based.
    pub fn zero(&self, k: usize) -> f64 {
        self.zeros[k - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.zeros
    }

    pub fn count(&self) -> usize {
        self.zeros.len()
    }
}

/// Residual accepted at a converged zero.
const ZERO_RESIDUAL: f64 = 1e-11;
/// Scan window used by the bracketing fallback.
const SCAN_STEP: f64 = std::f64::consts::FRAC_PI_2;

/// First `count` positive zeros of J_nu, each with |J_nu(j)| <= 1e-11.
pub fn bessel_zeros(nu: BesselOrder, count: usize) -> Result<ZeroTable> {
    if count == 0 {
        return Err(Error::Domain("bessel_zeros requires count >= 1".into()));
    }
    let order = nu.value();
    let mut zeros = Vec::with_capacity(count);
    let mut prev = order.max(1e-3); // zeros satisfy j_{nu,k} > nu
    for k in 1..=count {
        let z = find_kth_zero(order, k, prev)?;
        if z <= prev && k > 1 {
            return Err(Error::ZeroFinding {
                nu: order,
                index: k,
                detail: format!("ordering violated: {z} after {prev}"),
            });
        }
        zeros.push(z);
        prev = z;
    }
    // interlacing/monotonicity sanity before handing the table out
    for w in zeros.windows(2) {
        let gap = w[1] - w[0];
        if !(1.5..=8.0).contains(&gap) {
            return Err(Error::ZeroFinding {
                nu: order,
                index: 0,
                detail: format!("implausible gap {gap} between {} and {}", w[0], w[1]),
            });
        }
    }
    if zeros[0] <= order {
        return Err(Error::ZeroFinding {
            nu: order,
            index: 1,
            detail: format!("first zero {} not above the order {order}", zeros[0]),
        });
    }
    Ok(ZeroTable { nu, zeros })
}

fn mcmahon_guess(order: f64, k: usize) -> f64 {
    let beta = (k as f64 + 0.5 * order - 0.25) * std::f64::consts::PI;
    let mu = 4.0 * order * order;
    beta - (mu - 1.0) / (8.0 * beta)
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta).powi(3))
}

fn find_kth_zero(order: f64, k: usize, lower: f64) -> Result<f64> {
    let floor = if k == 1 { lower } else { lower + 0.3 };
    let guess = mcmahon_guess(order, k).max(floor + 0.1);

    if let Some(z) = newton_from(order, guess, floor) {
        if accept(order, z, floor) {
            return Ok(z);
        }
    }
    // fallback: forward scan from the floor in half-pi windows (zeros of J_nu
    // are at least ~2.9 apart, so a window holds at most one)
    let mut lo = floor;
    let mut flo = j_raw(order, lo);
    for _ in 0..4000 {
        let hi = lo + SCAN_STEP;
        let fhi = j_raw(order, hi);
        if flo == 0.0 {
            // landed on a zero exactly
            if accept(order, lo, floor) {
                return Ok(lo);
            }
        }
        if flo * fhi < 0.0 {
            let z = bisect_then_polish(order, lo, hi);
            if accept(order, z, floor) {
                return Ok(z);
            }
            return Err(Error::ZeroFinding {
                nu: order,
                index: k,
                detail: format!("bracketed root {z} failed the residual check"),
            });
        }
        lo = hi;
        flo = fhi;
    }
    Err(Error::ZeroFinding {
        nu: order,
        index: k,
        detail: "no sign change found in the scan range".into(),
    })
}

/// Newton iteration kept above `floor`; None when it stalls or wanders.
fn newton_from(order: f64, start: f64, floor: f64) -> Option<f64> {
    let mut x = start;
    for _ in 0..40 {
        let f = j_raw(order, x);
        let fp = j_prime_raw(order, x);
        if fp == 0.0 {
            return None;
        }
        let step = f / fp;
        let next = x - step;
        if !next.is_finite() || next <= floor || (next - start).abs() > 4.0 {
            return None;
        }
        if (next - x).abs() <= 1e-14 * x.abs() {
            return Some(next);
        }
        x = next;
    }
    None
}

fn bisect_then_polish(order: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = j_raw(order, lo);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = j_raw(order, mid);
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if hi - lo <= 1e-9 {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        let fp = j_prime_raw(order, x);
        if fp == 0.0 {
            break;
        }
        let next = x - j_raw(order, x) / fp;
        if next > lo - 1.0 && next < hi + 1.0 && next.is_finite() {
            x = next;
        } else {
            break;
        }
    }
    x
}

/// Residual plus sign-change validation around the candidate.
fn accept(order: f64, z: f64, floor: f64) -> bool {
    if z <= floor || !z.is_finite() {
        return false;
    }
    if j_raw(order, z).abs() > ZERO_RESIDUAL {
        return false;
    }
    let h = 1e-5 * z.max(1.0);
    j_raw(order, z - h) * j_raw(order, z + h) < 0.0
}
