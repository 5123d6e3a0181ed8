//! Simulator for a counterfactual Rydberg-mediated CZ gate on dual-rail photons.
//!
//! The crate is organised in layers:
//!
//! * [`quantum_core`] — dense complex linear algebra over small labeled
//!   Hilbert spaces: states, operators, Kraus channels, measurement and
//!   figures of merit.
//! * [`optics`] — dual-rail photon encoding and the optical elements
//!   (beamsplitters, phase shifters, loss and absorber channels).
//! * [`rydberg_bomb`] — the quantum bomb: a control Rydberg atom gating
//!   absorption in an effective two-level atomic ensemble via dipole
//!   blockade.
//! * [`interrogation`] — the N-cycle quantum interrogation engine
//!   (Elitzur-Vaidman detection, sign mode, quantum bombs, light-matter CZ)
//!   together with a density-operator oracle for cross-checking.
//! * [`cz_protocol`] — the six-stage two-photon CZ protocol with
//!   feed-forward correction and gate metrics.
//! * [`cli`] — configuration parsing, run records, parameter sweeps and
//!   the self-test suite backing the `czeno` binary.

pub mod cli;
pub mod cz_protocol;
mod error;
pub mod interrogation;
pub mod optics;
pub mod quantum_core;
pub mod rydberg_bomb;

pub use error::{Result, SimError};

/// Tolerance for exact-algebra checks (unitarity, normalization, basis
/// orthonormality). Double precision leaves ample headroom at 1e-12.
pub const TOL_EXACT: f64 = 1e-12;

/// Tolerance for accumulated-channel checks (trace preservation,
/// probability conservation over up to 1e4 cycle iterations).
pub const TOL_CHANNEL: f64 = 1e-10;
