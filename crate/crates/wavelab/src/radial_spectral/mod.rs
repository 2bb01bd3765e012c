//! Radial grids, the five-dimensional radial Fourier transform and the
//! multipliers built on it.
//!
//! The transform of a radial function on ℝ⁵ is
//! f̂(ρ) = ∫₀^∞ f(r) K(rρ) r⁴ dr with K(z) = 8π²(sin z − z cos z)/z³,
//! and the inverse carries the factor (2π)⁻⁵. Both are applied as dense
//! quadrature matrices on Gauss–Legendre grids.

mod field;
mod grid;
mod io;
mod lp;
mod propagate;

use std::f64::consts::PI;

pub use field::{
    forward_transform, fractional_derivative, inhomogeneous_norm, inverse_transform, lebesgue_norm, sobolev_norm,
    RadialField, SpectralField,
};
pub use grid::{fundamental_frequency, GridSpec, RadialGrid, DEFAULT_BANDWIDTH};
pub use io::{FieldEnvelope, CSV_SCHEMA_LINE};
pub use lp::{lp_bump, lp_multiplier, project_band, LPBand};
pub(crate) use propagate::rotate_free;
pub use propagate::{free_propagate, half_wave_propagate, HalfWave};

/// Surface measure of the unit sphere S⁴ ⊂ ℝ⁵.
pub const OMEGA4: f64 = 8.0 * PI * PI / 3.0;

/// (2π)⁻⁵, the inverse-transform normalization.
pub const INV_TWO_PI_5: f64 = 1.0 / (32.0 * PI * PI * PI * PI * PI);

/// k(z) = 3(sin z − z cos z)/z³, normalized so that k(0) = 1.
pub fn reduced_kernel(z: f64) -> f64 {
    let z = z.abs();
    if z < 0.5 {
        // 3 Σ (−1)^{m+1} 2m z^{2m−2} / (2m+1)!
        let z2 = z * z;
        let mut term = 1.0;
        let mut sum = 0.0;
        let mut fact = 6.0; // (2m+1)! at m = 1
        for m in 1..=9 {
            let mf = m as f64;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * 2.0 * mf * term / fact;
            term *= z2;
            fact *= (2.0 * mf + 2.0) * (2.0 * mf + 3.0);
        }
        3.0 * sum
    } else {
        3.0 * (z.sin() - z * z.cos()) / (z * z * z)
    }
}

/// Derivative k'(z).
pub fn reduced_kernel_derivative(z: f64) -> f64 {
    let sgn = z.signum();
    let z = z.abs();
    let v = if z < 0.5 {
        let z2 = z * z;
        let mut sum = 0.0;
        let mut pow = z; // z^{2m−3} at m = 2
        let mut fact = 120.0; // (2m+1)! at m = 2
        for m in 2..=10 {
            let mf = m as f64;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * 2.0 * mf * (2.0 * mf - 2.0) * pow / fact;
            pow *= z2;
            fact *= (2.0 * mf + 2.0) * (2.0 * mf + 3.0);
        }
        3.0 * sum
    } else {
        let (s, c) = z.sin_cos();
        3.0 * s / (z * z) - 9.0 * (s - z * c) / (z * z * z * z)
    };
    sgn * v
}

/// Full transform kernel K(z) = ω₄ k(z).
#[inline]
pub fn kernel(z: f64) -> f64 {
    OMEGA4 * reduced_kernel(z)
}

/// K'(z).
#[inline]
pub fn kernel_derivative(z: f64) -> f64 {
    OMEGA4 * reduced_kernel_derivative(z)
}
