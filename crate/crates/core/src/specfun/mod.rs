//! Real special functions: Gamma, Bessel J of real nonnegative order, its
//! derivative, and its positive zeros. Self-contained; every routine is a
//! pure function and safe to call concurrently.

mod bessel;
mod dd;
mod gamma;
mod zeros;

pub use bessel::{bessel_j, bessel_j_prime, BesselOrder, Z_SWITCH_BASE};
pub use gamma::{gamma, ln_gamma};
pub use zeros::{bessel_zeros, ZeroTable};

pub(crate) use bessel::{j_prime_raw, j_raw};
