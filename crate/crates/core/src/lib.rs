//! Semiclassical eigenvalues and O(k^-2) wave-corrected moments of bound
//! states of `U'' + k^2 (eps - V(x)) U = 0`, computed from the potential alone.
//!
//! The crate is organised bottom-up:
//!
//! * [`potentials`] – analytic potentials with derivatives to fifth order,
//!   and turning points.
//! * [`numerics`] – quadrature (including the inverse-square-root weight at
//!   turning points), root bracketing, ODE stepping and periodic antiderivatives.
//! * [`classical`] – the classical phase-space loop and its action.
//! * [`safe_terms`] – the first and second Gaussian-superposition amplitude
//!   corrections, and the circuit change `delta_F`.
//! * [`quantize`] – eigenvalue estimates at orders 0 and 1.
//! * [`moments`] – normalised first and second moments with their
//!   wave corrections.
//! * [`wavefield`] – direct synthesis of the superposition, for inspection.
//! * [`oracle`] – an independent Numerov shooting solver used as ground truth.
//! * [`closed_form`] – closed-form fixtures for the Pöschl–Teller and quartic wells.

pub mod classical;
pub mod closed_form;
pub mod error;
pub mod moments;
pub mod numerics;
pub mod oracle;
pub mod potentials;
pub mod quantize;
pub mod safe_terms;
pub mod wavefield;

pub use error::{Error, Result};
pub use potentials::{Potential, TurningPoints};
