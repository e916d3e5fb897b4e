//! Kinetic jump process of a harmonic chain of charged particles in a
//! magnetic field, and its fractional-diffusion / Lévy limits.
//!
//! * [`spectral`] — dispersion relations, rates, invariant measure, eigenmode check.
//! * [`kinetic_process`] — the jump process, its clock and flight functional.
//! * [`levy_calculus`] — implicit roots, Lévy densities, measures and exponents.
//! * [`tail_analysis`] — tails of the flight function under the invariant law.
//! * [`fractional_pde`] — Fourier-multiplier evolution of the limiting equations.
//! * [`experiments`] — Monte-Carlo checks of the scaling limits.
//! * [`acceptance`] — the acceptance criteria as executable checks.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod error;
pub mod experiments;
pub mod fractional_pde;
pub mod numerics;
pub mod kinetic_process;
pub mod levy_calculus;
pub mod spectral;
pub mod tail_analysis;

pub use error::{Error, Result};
