//! Bessel function of the first kind for real order, on the real half-line.
//!
//! Two regimes:
//!   * `z <= Z_SWITCH_BASE + max(order, 0)` — ascending power series, with the
//!     alternating part carried in double-double arithmetic,
//!   * above — Hankel large-argument expansion with `ASYMPTOTIC_TERMS`
//!     correction terms in each of the two amplitude series.
//!
//! The derivative uses `2 J_nu' = J_{nu-1} - J_{nu+1}`. (The recurrence is
//! misprinted with a plus sign in some sources; the plus-sign variant fails
//! the defining differential equation, see the `ode_residual_*` tests.)

use super::dd::Dd;
use super::gamma::{ln_gamma, ln_gamma_signed};
use crate::error::{Error, Result};

/// Nonnegative real Bessel order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::Domain(format!(
                "Bessel order must be finite and >= 0, got {nu}"
            )));
        }
        Ok(BesselOrder(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Series/asymptotic switch: series below `25 + max(order, 0)`.
pub const Z_SWITCH_BASE: f64 = 25.0;
/// Correction terms kept in each Hankel amplitude series.
const ASYMPTOTIC_TERMS: usize = 6;
/// Relative term threshold terminating the ascending series.
const SERIES_TERM_CUTOFF: f64 = 1e-18;
const SERIES_MAX_TERMS: usize = 600;

/// J_nu(z) for nu >= 0, z >= 0, absolute error <= 1e-11 for z <= 1000.
pub fn bessel_j(nu: BesselOrder, z: f64) -> Result<f64> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::Domain(format!(
            "bessel_j requires z >= 0, got {z}"
        )));
    }
    Ok(j_raw(nu.value(), z))
}

/// d/dz J_nu(z) for nu >= 0, z > 0, via 2 J' = J_{nu-1} - J_{nu+1}.
pub fn bessel_j_prime(nu: BesselOrder, z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Domain(format!(
            "bessel_j_prime requires z > 0, got {z}"
        )));
    }
    Ok(j_prime_raw(nu.value(), z))
}

/// Unchecked J for any real order; orders below zero arise internally from
/// the derivative relation at nu < 1.
pub(crate) fn j_raw(order: f64, z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z == 0.0 {
        return if order == 0.0 { 1.0 } else { 0.0 };
    }
    // negative integer order: J_{-m} = (-1)^m J_m
    if order < 0.0 && order == order.round() {
        let m = -order as i64;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        return sign * j_raw(-order, z);
    }
    if z <= Z_SWITCH_BASE + order.max(0.0) {
        j_series(order, z)
    } else {
        j_asymptotic(order, z)
    }
}

pub(crate) fn j_prime_raw(order: f64, z: f64) -> f64 {
    0.5 * (j_raw(order - 1.0, z) - j_raw(order + 1.0, z))
}

/// Ascending series sum_{n} (-1)^n (z/2)^{2n+nu} / (n! Gamma(n+nu+1)).
///
/// The common prefactor (z/2)^nu / Gamma(nu+1) carries only a relative
/// error, so it is assembled in log space in plain f64; the alternating
/// remainder, whose partial sums cancel by up to ten decades near the
/// switch point, runs in double-double.
fn j_series(order: f64, z: f64) -> f64 {
    let half = z * 0.5;
    let q = Dd::from_prod(half, half).neg();
    let mut term = Dd::from(1.0);
    let mut sum = Dd::from(1.0);
    let hump = half; // term magnitudes grow until n ~ z/2
    for n in 1..=SERIES_MAX_TERMS {
        let nf = n as f64;
        term = term
            .mul(q)
            .div(Dd::from(nf))
            .div(Dd::from_sum(nf, order));
        sum = sum.add(term);
        if term.hi.abs() <= SERIES_TERM_CUTOFF * sum.hi.abs() + 1e-300 && nf >= hump {
            break;
        }
    }
    // prefactor in log space: k! prod(j+nu) style denominators overflow long
    // before the value does
    let (lg, sign) = if order + 1.0 > 0.0 {
        (ln_gamma(order + 1.0), 1.0)
    } else {
        ln_gamma_signed(order + 1.0)
    };
    let ln_pref = order * half.ln() - lg;
    sign * ln_pref.exp() * sum.value()
}

/// Hankel expansion
/// `J_nu(z) = sqrt(2/(pi z)) [P cos(chi) - Q sin(chi)]`,
/// `chi = z - nu pi/2 - pi/4`, with P and Q truncated after
/// `ASYMPTOTIC_TERMS` corrections. First omitted term at the switch point
/// stays below 1e-12 across the orders used here.
fn j_asymptotic(order: f64, z: f64) -> f64 {
    let mu = 4.0 * order * order;
    let mut p = 1.0;
    let mut q = 0.0;
    // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! 8^k); even k feed P, odd k feed Q
    let mut a = 1.0;
    for k in 1..=(2 * ASYMPTOTIC_TERMS - 1) {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * z);
        let signed = if (k / 2) % 2 == 0 { a } else { -a };
        if k % 2 == 0 {
            p += signed;
        } else {
            q += signed;
        }
    }
    let chi = z - order * std::f64::consts::FRAC_PI_2 - std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Plain-f64 ascending series, independent of the production path;
    /// trustworthy for z <= 10 where there is no cancellation to speak of.
    fn j_series_oracle(order: f64, z: f64) -> f64 {
        let mut term = (0.5 * z).powf(order) / ln_gamma(order + 1.0).exp();
        let mut sum = term;
        for n in 1..200 {
            let nf = n as f64;
            term *= -(0.25 * z * z) / (nf * (nf + order));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    fn bisect_oracle(order: f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut flo = j_series_oracle(order, lo);
        assert!(flo * j_series_oracle(order, hi) < 0.0, "oracle bracket");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = j_series_oracle(order, mid);
            if flo * fm <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn value_at_origin() {
        let nu0 = BesselOrder::new(0.0).unwrap();
        let nu2 = BesselOrder::new(2.0).unwrap();
        assert_eq!(bessel_j(nu0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(nu2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn vanishes_at_first_zero_of_j0() {
        let nu0 = BesselOrder::new(0.0).unwrap();
        let root = bisect_oracle(0.0, 2.0, 3.0);
        assert!((root - 2.404_825_557_695_773).abs() < 1e-12);
        assert!(bessel_j(nu0, 2.404_825_557_695_773).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn series_and_asymptotic_agree_across_the_switch() {
        // the switch for nu=0 sits at z=25; both branches must agree nearby
        for &order in &[0.0, 0.5, 1.0, 3.0, 9.0] {
            let zs = Z_SWITCH_BASE + order;
            for dz in [-2.0, -0.5, -0.01, 0.0] {
                let z = zs + dz;
                let a = j_series(order, z);
                let b = j_asymptotic(order, z);
                assert!(
                    (a - b).abs() < 1e-12,
                    "branch mismatch at nu={order}, z={z}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn matches_oracle_at_small_arguments() {
        for &order in &[0.0, 0.3, 1.0, 2.5, 9.0] {
            for &z in &[0.1, 0.7, 1.9, 4.3, 8.8] {
                let nu = BesselOrder::new(order).unwrap();
                let got = bessel_j(nu, z).unwrap();
                let want = j_series_oracle(order, z);
                assert!(
                    (got - want).abs() <= 1e-13,
                    "nu={order}, z={z}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn prime_vanishes_at_origin_for_order_zero() {
        // J0 is even, so J0'(0+) = 0
        let nu0 = BesselOrder::new(0.0).unwrap();
        assert!(bessel_j_prime(nu0, 1e-8).unwrap().abs() <= 1e-7);
    }

    #[test]
    fn prime_matches_finite_differences() {
        // relative agreement 1e-7 against central differences on [0.5, 100]
        for &order in &[0.0, 0.4, 1.0, 2.0, 5.5] {
            let nu = BesselOrder::new(order).unwrap();
            for i in 0..40 {
                let z = 0.5 * (100.0f64 / 0.5).powf(i as f64 / 39.0);
                let h = 1e-6 * z.max(1.0);
                let fd = (j_raw(order, z + h) - j_raw(order, z - h)) / (2.0 * h);
                let got = bessel_j_prime(nu, z).unwrap();
                let scale = fd.abs().max(1e-3);
                assert!(
                    ((got - fd) / scale).abs() <= 1e-7,
                    "nu={order}, z={z}: {got} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn prime_value_at_first_zero_of_j0() {
        // J0'(j_{0,1}) = -J1(j_{0,1}); frozen from the finite-difference oracle
        let nu0 = BesselOrder::new(0.0).unwrap();
        let z = 2.404_825_557_695_773;
        let h = 1e-6;
        let fd = (j_raw(0.0, z + h) - j_raw(0.0, z - h)) / (2.0 * h);
        let got = bessel_j_prime(nu0, z).unwrap();
        assert_relative_eq!(got, -0.519_147_497_3, max_relative = 1e-8);
        assert_relative_eq!(got, fd, max_relative = 1e-9);
    }

    fn ode_residual(order: f64, z: f64) -> f64 {
        // z^2 J'' + z J' + (z^2 - nu^2) J, with J'' from the derivative
        // relation applied twice: 4 J'' = J_{nu-2} - 2 J_nu + J_{nu+2}
        let j = j_raw(order, z);
        let jp = j_prime_raw(order, z);
        let jpp = 0.25 * (j_raw(order - 2.0, z) - 2.0 * j + j_raw(order + 2.0, z));
        z * z * jpp + z * jp + (z * z - order * order) * j
    }

    #[test]
    fn ode_residual_at_reference_point() {
        assert!(ode_residual(1.0, 3.0).abs() <= 1e-9);
    }

    #[test]
    fn ode_residual_on_log_grid() {
        for &order in &[0.0, 0.5, 1.0, 2.0, 3.0] {
            for i in 0..40 {
                let z = 0.1 * (500.0f64 / 0.1).powf(i as f64 / 39.0);
                let r = ode_residual(order, z);
                assert!(
                    r.abs() <= 1e-9,
                    "ODE residual {r:e} at nu={order}, z={z}"
                );
            }
        }
    }

    #[test]
    fn plus_sign_recurrence_variant_fails_the_ode() {
        // documents the sign question: with 2J' = J_{nu-1} + J_{nu+1} the
        // residual of the defining equation is O(1) instead of ~1e-12
        let order = 1.0;
        let z = 3.0;
        let j = j_raw(order, z);
        let jp_plus = 0.5 * (j_raw(order - 1.0, z) + j_raw(order + 1.0, z));
        let jpp_plus = 0.25 * (j_raw(order - 2.0, z) + 2.0 * j + j_raw(order + 2.0, z));
        let res = z * z * jpp_plus + z * jp_plus + (z * z - order * order) * j;
        assert!(res.abs() > 1e-2, "plus-sign variant unexpectedly consistent");
    }

    #[test]
    fn rejects_bad_arguments() {
        let nu = BesselOrder::new(1.0).unwrap();
        assert!(bessel_j(nu, -0.1).is_err());
        assert!(bessel_j_prime(nu, 0.0).is_err());
        assert!(BesselOrder::new(-1.0).is_err());
        assert!(BesselOrder::new(f64::NAN).is_err());
    }
}
