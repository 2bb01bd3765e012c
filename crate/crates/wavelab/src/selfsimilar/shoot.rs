//! Shooting for the stationary equation (1 − y²)Δw − 2w + F(y, w) = 0 from y = 0.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, WaveLabError};
use crate::models::ModelSpec;
use crate::stationary_ode::integrators::{dopri5, gbs_fixed, Tolerances};

/// Start of the integration; the regular series w = a + c y² is used below it.
const Y0: f64 = 1e-4;

fn series_start(model: &ModelSpec, a: f64) -> [f64; 2] {
    // At y = 0, Δw = 5w'' so w''(0) = (2a − F(0, a))/5.
    let c = (2.0 * a - model.force(0.0, a)) / 5.0;
    [a + 0.5 * c * Y0 * Y0, c * Y0]
}

fn field(model: ModelSpec) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |y, v| [v[1], -4.0 * v[1] / y + (2.0 * v[0] - model.force(y, v[0])) / (1.0 - y * y)]
}

fn check(a: f64, eps: f64) -> Result<()> {
    if !a.is_finite() || !(eps > 0.0 && eps < 1.0 - Y0) {
        return Err(WaveLabError::InvalidArgument(format!(
            "shooting needs finite a and eps in (0, 1), got {a}, {eps}"
        )));
    }
    Ok(())
}

/// (w, w') at the requested increasing points y ∈ [1e-4, 1).
pub fn elliptic_shoot_profile(model: &ModelSpec, a: f64, ys: &[f64]) -> Result<Vec<[f64; 2]>> {
    check(a, 1.0 - ys.last().copied().unwrap_or(0.5))?;
    if a == 0.0 {
        return Ok(vec![[0.0, 0.0]; ys.len()]);
    }
    let tol = Tolerances { rtol: 1e-12, atol: 1e-14, ..Default::default() };
    dopri5(field(*model), Y0, series_start(model, a), ys, tol, |y, v| {
        (!(v[0].abs() < 1e8)).then_some(WaveLabError::Escape { s: y, bound: 1e8 })
    })
}

/// Terminal values (w, w') at y = 1 − ε of the regular solution with w(0) = a.
pub fn elliptic_shoot(model: &ModelSpec, a: f64, eps: f64) -> Result<(f64, f64)> {
    check(a, eps)?;
    let v = elliptic_shoot_profile(model, a, &[1.0 - eps])?;
    Ok((v[0][0], v[0][1]))
}

/// The same terminal values from fixed-step extrapolation.
pub fn elliptic_shoot_gbs(model: &ModelSpec, a: f64, eps: f64, macro_steps: usize) -> Result<(f64, f64)> {
    check(a, eps)?;
    if a == 0.0 {
        return Ok((0.0, 0.0));
    }
    let v = gbs_fixed(field(*model), Y0, series_start(model, a), 1.0 - eps, macro_steps, 8);
    Ok((v[0], v[1]))
}

/// One row of a shooting scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootRow {
    pub a: f64,
    pub eps: f64,
    pub w_end: f64,
    pub wprime_end: f64,
    /// |w(1−ε)| + |w'(1−ε)|.
    pub defect: f64,
}

/// Terminal values over a grid of shooting parameters, computed in parallel.
pub fn shoot_scan(model: &ModelSpec, a_values: &[f64], eps: f64) -> Result<Vec<ShootRow>> {
    a_values
        .par_iter()
        .map(|&a| {
            let (w, wp) = elliptic_shoot(model, a, eps)?;
            Ok(ShootRow { a, eps, w_end: w, wprime_end: wp, defect: w.abs() + wp.abs() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_shots() {
        let m = ModelSpec::cubic_focusing();
        assert_eq!(elliptic_shoot(&m, 0.0, 1e-3).unwrap(), (0.0, 0.0));
        let (w, wp) = elliptic_shoot(&m, 2f64.sqrt(), 1e-3).unwrap();
        assert!((w - 2f64.sqrt()).abs() < 1e-12 && wp.abs() < 1e-10);
    }

    #[test]
    fn shots_agree_with_fixed_step_oracle() {
        let m = ModelSpec::cubic_focusing();
        let (w, wp) = elliptic_shoot(&m, 1.0, 1e-2).unwrap();
        let (w2, wp2) = elliptic_shoot_gbs(&m, 1.0, 1e-2, 4000).unwrap();
        assert!((w - w2).abs() < 1e-9 && (wp - wp2).abs() < 1e-9 * wp.abs().max(1.0), "{w} {w2} {wp} {wp2}");
    }

    #[test]
    fn boundary_defect_stays_away_from_zero() {
        let m = ModelSpec::cubic_focusing();
        for eps in [1e-2, 1e-3, 1e-4] {
            let (w, wp) = elliptic_shoot(&m, 1.0, eps).unwrap();
            assert!(w.abs() + wp.abs() > 0.1, "eps {eps}: {w} {wp}");
        }
    }

    #[test]
    fn near_equilibrium_shots_stay_near_constant() {
        let m = ModelSpec::cubic_focusing();
        let ys: Vec<f64> = (1..=50).map(|i| 0.01 * i as f64).collect();
        for d in [1e-3, -1e-3, 1e-5] {
            let a = 2f64.sqrt() + d;
            for v in elliptic_shoot_profile(&m, a, &ys).unwrap() {
                assert!((v[0] - a).abs() < 10.0 * d.abs());
            }
        }
    }
}
