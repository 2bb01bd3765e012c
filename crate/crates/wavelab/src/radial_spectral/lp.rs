use super::{forward_transform, inverse_transform, RadialField};
use crate::error::{Result, WaveLabError};

/// Unnormalized mollifier bump exp(−1/(1−t²)) on |t| < 1.
pub fn lp_bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// φ(ρ/2^k): the bump in log₂ρ − k divided by the sum over all dyadic shifts,
/// so that Σ_k φ(ρ/2^k) = 1 for every ρ > 0.
pub fn lp_multiplier(k: i32, rho: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    let l = rho.log2();
    let t = l - k as f64;
    if t.abs() >= 1.0 {
        return 0.0;
    }
    let base = l.floor() as i32;
    let mut denom = 0.0;
    for j in base - 1..=base + 2 {
        denom += lp_bump(l - j as f64);
    }
    lp_bump(t) / denom
}

/// Dyadic Littlewood–Paley band P_k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LPBand {
    pub k: i32,
}

impl LPBand {
    pub fn new(k: i32) -> Self {
        Self { k }
    }

    pub fn multiplier(&self, rho: f64) -> f64 {
        lp_multiplier(self.k, rho)
    }

    /// Support of the multiplier in ρ.
    pub fn support(&self) -> (f64, f64) {
        let c = 2f64.powi(self.k);
        (0.5 * c, 2.0 * c)
    }
}

/// P_k f.
pub fn project_band(f: &RadialField, k: i32) -> Result<RadialField> {
    let centre = 2f64.powi(k);
    let grid = f.grid();
    if centre < grid.rho_min() || centre > grid.rho_max() {
        return Err(WaveLabError::OutOfRange(format!(
            "band 2^{k} outside resolved frequencies [{:.3e}, {:.3e}]",
            grid.rho_min(),
            grid.rho_max()
        )));
    }
    let spec = forward_transform(f)?;
    inverse_transform(&spec.multiply(|p| lp_multiplier(k, p)))
}
