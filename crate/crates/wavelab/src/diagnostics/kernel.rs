use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, WaveLabError};
use crate::quad::{adaptive_gk, linear_fit};
use crate::radial_spectral::{lp_multiplier, reduced_kernel, INV_TWO_PI_5};

/// One evaluation of the oscillatory kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSample {
    pub k: i32,
    pub lag: f64,
    pub dist: f64,
    pub value: f64,
    pub bound: f64,
}

/// K_k(lag, dist) with the frequency cutoff scaled by `amplitude`.
///
/// The angular integral ∫₀^π e^{iz cos θ} sin³θ dθ equals (4/3)k(z), which
/// leaves a single oscillatory integral over the band 2^{k−1} < ρ < 2^{k+1}.
pub fn kernel_kk_scaled(k: i32, lag: f64, dist: f64, amplitude: f64) -> Result<Complex64> {
    if !(-4..=8).contains(&k) {
        return Err(WaveLabError::OutOfRange(format!("band index k = {k} outside [-4, 8]")));
    }
    if !(lag > 0.0 && lag.is_finite()) || !(dist >= 0.0 && dist.is_finite()) {
        return Err(WaveLabError::InvalidArgument("kernel needs lag > 0 and dist >= 0".into()));
    }
    let c = 2f64.powi(k);
    let pref = INV_TWO_PI_5 * 2.0 * PI * PI * amplitude;
    let f = |p: f64| {
        let radial = lp_multiplier(k, p) * p.powi(5) * (4.0 / 3.0) * reduced_kernel(dist * p);
        Complex64::from_polar(radial, p * lag)
    };
    let scale = c.powi(6);
    let v = adaptive_gk(&f, 0.5 * c, 2.0 * c, 1e-15 * scale, 1e-11)?;
    Ok(pref * v)
}

/// K_k(lag, dist) for the unit cutoff.
pub fn kernel_kk(k: i32, lag: f64, dist: f64) -> Result<Complex64> {
    kernel_kk_scaled(k, lag, dist, 1.0)
}

/// C_L 2^{6k} ⟨2^k |lag − dist|⟩^{−L}.
pub fn kernel_bound(k: i32, lag: f64, dist: f64, c_l: f64, l: f64) -> f64 {
    let x = 2f64.powi(k) * (lag - dist).abs();
    c_l * 2f64.powi(6 * k) * (1.0 + x * x).powf(-0.5 * l)
}

/// Sweep grid at band k: 50 lags log-spaced on [2^{−k}, 2^{4−k}] at dist = 0,
/// and 50 distances on [0, 2^{4−k}] at lag = 2^{1−k}.
pub fn kernel_sweep(k: i32) -> Vec<(f64, f64)> {
    let s = 2f64.powi(-k);
    let mut pts: Vec<(f64, f64)> = (0..50).map(|i| (s * 2f64.powf(4.0 * i as f64 / 49.0), 0.0)).collect();
    pts.extend((0..50).map(|i| (2.0 * s, 16.0 * s * i as f64 / 49.0)));
    pts
}

/// Evaluates the sweep at band k and the ratio |K_k| / bound for a given constant.
pub fn kernel_samples(k: i32, c_l: f64, l: f64) -> Result<Vec<KernelSample>> {
    kernel_sweep(k)
        .into_par_iter()
        .map(|(lag, dist)| {
            let value = kernel_kk(k, lag, dist)?.norm();
            Ok(KernelSample { k, lag, dist, value, bound: kernel_bound(k, lag, dist, c_l, l) })
        })
        .collect()
}

/// Smallest C_L making the bound hold on the k = 0 sweep.
pub fn fit_kernel_constant(l: f64) -> Result<f64> {
    let samples = kernel_samples(0, 1.0, l)?;
    Ok(samples.iter().map(|s| s.value / s.bound).fold(0.0, f64::max))
}

/// Log-log slope of |K_k| against ⟨2^k lag⟩ at dist = 0, fitted where 2^k lag ≥ 4.
///
/// Below that the phase e^{iρ·lag} turns less than a few times across the band
/// and the kernel sits at its peak, so no decay is expected there.
pub fn kernel_decay_slope(k: i32) -> Result<f64> {
    let c = 2f64.powi(k);
    let pts: Vec<(f64, f64)> = kernel_sweep(k).into_iter().filter(|&(lag, d)| d == 0.0 && c * lag >= 4.0).collect();
    let vals: Vec<f64> =
        pts.par_iter().map(|&(lag, d)| kernel_kk(k, lag, d).map(|v| v.norm())).collect::<Result<_>>()?;
    let x: Vec<f64> = pts.iter().map(|&(lag, _)| (1.0 + (c * lag).powi(2)).sqrt().ln()).collect();
    let y: Vec<f64> = vals.iter().map(|v| v.max(1e-300).ln()).collect();
    Ok(linear_fit(&x, &y).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_is_linear() {
        let a = kernel_kk_scaled(1, 0.7, 0.2, 1.0).unwrap();
        let b = kernel_kk_scaled(1, 0.7, 0.2, 2.0).unwrap();
        assert!((b - 2.0 * a).norm() < 1e-12 * a.norm().max(1e-300));
    }

    #[test]
    fn one_constant_across_bands() {
        let c2 = fit_kernel_constant(2.0).unwrap();
        for k in 1..=3 {
            for s in kernel_samples(k, c2, 2.0).unwrap() {
                assert!(s.value <= s.bound * (1.0 + 1e-6), "{s:?}");
            }
        }
    }

    #[test]
    fn decays_in_lag() {
        let slope = kernel_decay_slope(2).unwrap();
        assert!(slope <= -1.8, "slope {slope}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(kernel_kk(9, 1.0, 0.0).is_err());
        assert!(kernel_kk(0, 0.0, 0.0).is_err());
    }
}
