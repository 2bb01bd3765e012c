//! Numerical laboratory for radial semilinear waves and 1-equivariant wave
//! maps in five space dimensions.
//!
//! The crate is organized bottom-up: [`radial_spectral`] supplies grids and
//! the radial Fourier transform, [`models`] the nonlinearities and energies,
//! [`evolve`] the time integrators, and the remaining modules the
//! diagnostics and experiments built on them.

// Negated float comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod quad;

pub mod channels;
pub mod cli;
pub mod diagnostics;
pub mod evolve;
pub mod models;
pub mod oracles;
pub mod radial_spectral;
pub mod selfsimilar;
pub mod stationary_ode;

pub use error::{Result, WaveLabError};
