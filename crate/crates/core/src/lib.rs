//! Flatness-based boundary control of the strongly degenerate heat equation
//!
//! ```text
//! d/dt f - d/dx (x^a d/dx f) = 0   on (0,1),  a in [1,2)
//! (x^a f_x)(t,0) = 0,  f(t,1) = u(t),  f(0,.) = f0
//! ```
//!
//! The crate builds the explicit boundary control `u` that steers any L2
//! initial datum to zero in finite time, and verifies the steering with two
//! independent solvers:
//!
//! * [`specfun`] — Gamma, Bessel J of real order, and its zeros;
//! * [`jets`] — truncated Taylor arithmetic and the Gevrey bump;
//! * [`spectral`] — Bessel eigenbasis, projections, free evolution, and the
//!   flat-output derivative stack;
//! * [`flatness`] — series denominators, the series solution and control,
//!   Gevrey fit and control assembly;
//! * [`simulator`] — spectral Galerkin and finite-volume verification
//!   solvers with cross-validation.

pub mod error;
pub mod flatness;
pub mod grid;
pub mod interp;
pub mod jets;
pub mod quad;
pub mod simulator;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
pub use flatness::{ControlSignal, GevreyFit, SeriesDenominators};
pub use jets::Jet;
pub use simulator::{GridState, LiftedState};
pub use specfun::{BesselOrder, ZeroTable};
pub use spectral::{EigenBasis, InitialDatum, ModelParams, SpectralCoeffs};
