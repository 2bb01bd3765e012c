use std::sync::Arc;

use super::field::spectral_sobolev_norm;
use super::{forward_transform, inverse_transform, RadialField, RadialGrid, SpectralField};
use crate::error::{Result, WaveLabError};
use crate::models::State;
use crate::quad;

/// Rotates (û, û_t) by the exact free-wave multipliers for a time t.
pub(crate) fn rotate_free(grid: &RadialGrid, uh: &[f64], uth: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = Vec::with_capacity(uh.len());
    let mut b = Vec::with_capacity(uh.len());
    for ((&p, &u0), &u1) in grid.freq_nodes().iter().zip(uh).zip(uth) {
        let (s, c) = (t * p).sin_cos();
        // sin(tρ)/ρ with its t limit at ρ → 0.
        let sinc = if p * t.abs() < 1e-8 { t } else { s / p };
        a.push(c * u0 + sinc * u1);
        b.push(-p * s * u0 + c * u1);
    }
    (a, b)
}

/// Exact free evolution S(t): û(t) = cos(tρ)û₀ + sin(tρ)/ρ û₁, û_t(t) = −ρ sin(tρ)û₀ + cos(tρ)û₁.
pub fn free_propagate(state: &State, t: f64) -> Result<State> {
    if !t.is_finite() {
        return Err(WaveLabError::InvalidArgument("propagation time must be finite".into()));
    }
    let grid = state.grid().clone();
    let n = grid.n();
    let (uh, uth) = quad::matvec2(grid.forward_matrix(), n, state.u.values(), state.ut.values());
    let (a, b) = rotate_free(&grid, &uh, &uth, t);
    let (u, ut) = quad::matvec2(grid.inverse_matrix(), n, &a, &b);
    State::new(state.t + t, RadialField::from_raw(grid.clone(), u), RadialField::from_raw(grid, ut))
}

/// Complex half-wave variable v̂ = û + i ρ⁻¹ û_t, so that v = u + i(−Δ)^{−1/2} u_t.
#[derive(Debug, Clone)]
pub struct HalfWave {
    grid: Arc<RadialGrid>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl HalfWave {
    pub fn from_state(state: &State) -> Result<Self> {
        let uh = forward_transform(&state.u)?;
        let uth = forward_transform(&state.ut)?;
        let grid = state.grid().clone();
        let im = grid.freq_nodes().iter().zip(uth.values()).map(|(p, v)| v / p).collect();
        Ok(Self { grid, re: uh.into_values(), im })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// Back to (u, u_t): û = Re v̂, û_t = ρ Im v̂.
    pub fn to_state(&self, t: f64) -> Result<State> {
        let uh = SpectralField::new(self.grid.clone(), self.re.clone())?;
        let uth: Vec<f64> = self.grid.freq_nodes().iter().zip(&self.im).map(|(p, v)| p * v).collect();
        let uth = SpectralField::new(self.grid.clone(), uth)?;
        State::new(t, inverse_transform(&uh)?, inverse_transform(&uth)?)
    }

    /// (‖Re v‖²_{Ḣ^s} + ‖Im v‖²_{Ḣ^s})^{1/2}.
    pub fn sobolev_norm(&self, s: f64) -> Result<f64> {
        let a = spectral_sobolev_norm(&SpectralField::from_raw(self.grid.clone(), self.re.clone()), s)?;
        let b = spectral_sobolev_norm(&SpectralField::from_raw(self.grid.clone(), self.im.clone()), s)?;
        Ok((a * a + b * b).sqrt())
    }
}

/// Multiplies v̂ by e^{−itρ}.
pub fn half_wave_propagate(v: &HalfWave, t: f64) -> HalfWave {
    let mut re = Vec::with_capacity(v.re.len());
    let mut im = Vec::with_capacity(v.re.len());
    for ((&p, &a), &b) in v.grid.freq_nodes().iter().zip(&v.re).zip(&v.im) {
        let (s, c) = (t * p).sin_cos();
        re.push(c * a + s * b);
        im.push(c * b - s * a);
    }
    HalfWave { grid: v.grid.clone(), re, im }
}
