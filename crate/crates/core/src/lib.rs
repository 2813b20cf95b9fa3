//! Kinetic model of income distribution under taxation, tax evasion, audits
//! and fines.
//!
//! A population is divided into `n` income classes and `m` behavioral
//! sectors with fixed evasion attitudes. Pairwise monetary exchanges,
//! taxation of the receiver and per-capita redistribution of the revenue
//! drive a system of `n * m` nonlinear ODEs whose solutions relax to a
//! stationary income distribution. The crate builds the interaction
//! coefficients ([`kinetics`]), integrates the system to equilibrium
//! ([`dynamics`]), evaluates distributional observables ([`metrics`]),
//! sweeps enforcement parameters and calibrates the bilinear revenue surface
//! ([`calibration`]), and exposes all of it as a batch CLI ([`workbench`]).

pub mod calibration;
pub mod dynamics;
pub mod error;
pub mod kinetics;
pub mod metrics;
pub mod workbench;

pub use error::{Error, Result};
