//! Initial-data families shared by experiments, the CLI and tests.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use super::{turok_spergel_u, State};
use crate::error::Result;
use crate::radial_spectral::RadialGrid;

/// 0.5·erfc((r − centre)/width): 1 inside, 0 outside, Gaussian transition.
pub fn erfc_cut(r: f64, centre: f64, width: f64) -> f64 {
    0.5 * libm::erfc((r - centre) / width)
}

/// (A e^{−r²/2w²}, 0).
pub fn gaussian(grid: Arc<RadialGrid>, amplitude: f64, width: f64) -> State {
    let a = 0.5 / (width * width);
    State::from_fns(grid, 0.0, |r| amplitude * (-a * r * r).exp(), |_| 0.0)
}

/// Gaussian data with a nonzero velocity, used for generic smooth runs.
pub fn free_state_gaussian(grid: Arc<RadialGrid>, amplitude: f64, width: f64) -> State {
    let a = 0.5 / (width * width);
    State::from_fns(
        grid,
        0.0,
        |r| amplitude * (-a * r * r).exp(),
        |r| amplitude * (1.0 - a * r * r) * (-a * r * r).exp() / width,
    )
}

/// Constant `value` on r < radius with an erfc transition of the given width.
pub fn constant_ball(grid: Arc<RadialGrid>, value: f64, radius: f64, smoothing: f64) -> State {
    State::from_fns(grid, 0.0, |r| value * erfc_cut(r, radius, smoothing), |_| 0.0)
}

/// Truncated data of the ODE blow-up solution √2/(T − t) at t = 0:
/// (√2/T, √2/T²) on the ball, cut smoothly beyond `radius`.
pub fn ode_blowup_data(grid: Arc<RadialGrid>, big_t: f64, radius: f64, smoothing: f64) -> State {
    let u0 = SQRT_2 / big_t;
    let u1 = SQRT_2 / (big_t * big_t);
    State::from_fns(grid, 0.0, |r| u0 * erfc_cut(r, radius, smoothing), |r| u1 * erfc_cut(r, radius, smoothing))
}

/// The explicit wave map at time t0 in u = ψ/r variables, cut beyond `truncation`.
pub fn turok_spergel_data(grid: Arc<RadialGrid>, t0: f64, truncation: f64, smoothing: f64) -> Result<State> {
    let mut u = Vec::with_capacity(grid.n());
    let mut ut = Vec::with_capacity(grid.n());
    for &r in grid.nodes() {
        let (a, b) = turok_spergel_u(t0, r)?;
        let c = erfc_cut(r, truncation, smoothing);
        u.push(a * c);
        ut.push(b * c);
    }
    let mut s = State::new(
        t0,
        crate::radial_spectral::RadialField::new(grid.clone(), u)?,
        crate::radial_spectral::RadialField::new(grid, ut)?,
    )?;
    s.t = t0;
    Ok(s)
}
