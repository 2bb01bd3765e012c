//! Scalar and profile diagnostics monitored along evolutions: the critical
//! norm, Strichartz accumulators, compactness tails and the modulation scale,
//! frequency envelopes, the oscillatory kernel bound and the v₀/v₁ functionals.

mod envelope;
mod kernel;
mod profiles;

use serde::Serialize;

pub use envelope::{
    bernstein_derivative_ratio, bernstein_lebesgue_ratio, bernstein_sup_constant, frequency_envelope, schur_constant,
    EnvelopeSeq, DEFAULT_SIGMA,
};
pub use kernel::{
    fit_kernel_constant, kernel_bound, kernel_decay_slope, kernel_kk, kernel_kk_scaled, kernel_samples, kernel_sweep,
    KernelSample,
};
pub use profiles::{difference_report, v0v1_profiles, DifferenceRow, V0V1Report};

use crate::error::{Result, WaveLabError};
use crate::evolve::Trajectory;
use crate::models::State;
use crate::radial_spectral::{
    forward_transform, fractional_derivative, lebesgue_norm, sobolev_norm, INV_TWO_PI_5, OMEGA4,
};

/// ‖(u, u_t)‖ in Ḣ^{3/2} × Ḣ^{1/2}.
pub fn critical_norm(state: &State) -> Result<f64> {
    let a = sobolev_norm(&state.u, 1.5)?;
    let b = sobolev_norm(&state.ut, 0.5)?;
    Ok((a * a + b * b).sqrt())
}

/// Critical norm at every snapshot of a trajectory.
pub fn critical_norm_series(traj: &Trajectory) -> Result<Vec<(f64, f64)>> {
    traj.snapshots.iter().map(|s| Ok((s.t, critical_norm(s)?))).collect()
}

/// Per-node contributions to the squared critical norm, ascending in ρ.
fn critical_density(state: &State) -> Result<Vec<(f64, f64)>> {
    let a = forward_transform(&state.u)?;
    let b = forward_transform(&state.ut)?;
    let grid = state.grid();
    let mut out: Vec<(f64, f64)> = grid
        .freq_nodes()
        .iter()
        .zip(grid.freq_weights())
        .zip(a.values().iter().zip(b.values()))
        .map(|((&p, &w), (&x, &y))| (p, INV_TWO_PI_5 * OMEGA4 * w * (p * p * p * x * x + p * y * y)))
        .collect();
    out.sort_by(|l, r| l.0.total_cmp(&r.0));
    Ok(out)
}

/// Modulation scale: the median frequency of the critical-norm spectral density.
pub fn modulation_scale(state: &State) -> Result<f64> {
    let dens = critical_density(state)?;
    let total: f64 = dens.iter().map(|d| d.1).sum();
    if !(total > 0.0) {
        return Err(WaveLabError::IllPosed("zero state has no modulation scale".into()));
    }
    let half = 0.5 * total;
    let mut acc = 0.0;
    let mut prev_rho = 0.0;
    for &(p, m) in &dens {
        if acc + m >= half {
            let frac = if m > 0.0 { (half - acc) / m } else { 0.0 };
            return Ok(prev_rho + frac * (p - prev_rho));
        }
        acc += m;
        prev_rho = p;
    }
    Ok(prev_rho)
}

/// Result of the dyadic tail search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailReport {
    pub eta: f64,
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    pub n_est: f64,
    /// Mass fractions at the chosen scales: low frequency, high frequency, far field.
    pub low_fraction: f64,
    pub high_fraction: f64,
    pub far_fraction: f64,
}

/// Smallest C and largest c (powers of two) with the low-frequency, high-frequency
/// and far-field tails of the critical density each at most η of the total.
pub fn compactness_tails(state: &State, eta: f64) -> Result<TailReport> {
    if !(eta > 0.0 && eta < 0.5) {
        return Err(WaveLabError::InvalidArgument(format!("tail tolerance eta = {eta} outside (0, 1/2)")));
    }
    let n_est = modulation_scale(state)?;
    let dens = critical_density(state)?;
    let total: f64 = dens.iter().map(|d| d.1).sum();
    let below = |cut: f64| dens.iter().filter(|d| d.0 < cut).map(|d| d.1).sum::<f64>() / total;
    let above = |cut: f64| dens.iter().filter(|d| d.0 > cut).map(|d| d.1).sum::<f64>() / total;

    // Spatial density of the same quantity: |∇|^{3/2}u and |∇|^{1/2}u_t.
    let du = fractional_derivative(&state.u, 1.5)?;
    let dut = fractional_derivative(&state.ut, 0.5)?;
    let grid = state.grid();
    let space: Vec<(f64, f64)> = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(du.values().iter().zip(dut.values()))
        .map(|((&r, &w), (&a, &b))| (r, OMEGA4 * w * (a * a + b * b)))
        .collect();
    let space_total: f64 = space.iter().map(|s| s.1).sum();
    let far = |radius: f64| {
        if space_total > 0.0 {
            space.iter().filter(|s| s.0 > radius).map(|s| s.1).sum::<f64>() / space_total
        } else {
            0.0
        }
    };

    let mut c = 1.0;
    for _ in 0..60 {
        if below(c * n_est) <= eta {
            break;
        }
        c *= 0.5;
    }
    let mut big_c = 1.0;
    for _ in 0..60 {
        if above(big_c * n_est) <= eta && far(big_c / n_est) <= eta {
            break;
        }
        big_c *= 2.0;
    }
    Ok(TailReport {
        eta,
        c,
        big_c,
        n_est,
        low_fraction: below(c * n_est),
        high_fraction: above(big_c * n_est),
        far_fraction: far(big_c / n_est),
    })
}

/// (∫_{t0}^{t1} ‖u(t)‖²_{L¹⁰} dt)^{1/2} by the trapezoid rule on snapshots.
pub fn strichartz_accumulate(traj: &Trajectory, window: (f64, f64)) -> Result<f64> {
    let (t0, t1) = window;
    if !(t1 >= t0) {
        return Err(WaveLabError::InvalidArgument("Strichartz window must have t1 >= t0".into()));
    }
    if t1 == t0 {
        return Ok(0.0);
    }
    let slack = 1e-9 * (t1 - t0).max(1.0);
    let snaps: Vec<&State> = traj.snapshots.iter().filter(|s| s.t >= t0 - slack && s.t <= t1 + slack).collect();
    let covered =
        snaps.len() >= 2 && (snaps[0].t - t0).abs() <= slack && (snaps[snaps.len() - 1].t - t1).abs() <= slack;
    if !covered {
        return Err(WaveLabError::OutOfRange(format!("window [{t0}, {t1}] is not covered by snapshots")));
    }
    let max_gap = snaps.windows(2).map(|p| p[1].t - p[0].t).fold(0.0, f64::max);
    if max_gap > (t1 - t0) / 50.0 + slack {
        return Err(WaveLabError::InvalidArgument(format!(
            "snapshots too sparse: gap {max_gap:.3e} exceeds window/50"
        )));
    }
    let values: Vec<f64> = snaps.iter().map(|s| lebesgue_norm(&s.u, 10.0).map(|v| v * v)).collect::<Result<_>>()?;
    let mut sum = 0.0;
    for i in 1..snaps.len() {
        sum += 0.5 * (snaps[i].t - snaps[i - 1].t) * (values[i] + values[i - 1]);
    }
    Ok(sum.sqrt())
}

/// Strichartz increments over consecutive windows [T, T + width] starting at `start`.
pub fn strichartz_increments(traj: &Trajectory, start: f64, width: f64) -> Result<Vec<(f64, f64)>> {
    let end = traj.last().t;
    let mut out = Vec::new();
    let mut t = start;
    while t + width <= end + 1e-9 * width {
        out.push((t, strichartz_accumulate(traj, (t, (t + width).min(end)))?));
        t += width;
    }
    Ok(out)
}

/// S-norm over [t0 − δ/N(t0), t0 + δ/N(t0)].
pub fn local_strichartz(traj: &Trajectory, t0: f64, delta: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(WaveLabError::InvalidArgument("delta must be nonnegative".into()));
    }
    let n = modulation_scale(traj.nearest(t0))?;
    let half = delta / n;
    let (first, last) = (traj.snapshots[0].t, traj.last().t);
    if t0 - half < first - 1e-12 || t0 + half > last + 1e-12 {
        return Err(WaveLabError::OutOfRange(format!(
            "window [{:.4}, {:.4}] exceeds trajectory span [{first}, {last}]",
            t0 - half,
            t0 + half
        )));
    }
    if half == 0.0 {
        return Ok(0.0);
    }
    // Snap the window to the snapshot times so the trapezoid sees whole panels.
    let snap_to = |t: f64| traj.nearest(t).t;
    let (a, b) = (snap_to(t0 - half), snap_to(t0 + half));
    if b <= a {
        return Ok(0.0);
    }
    let sub = Trajectory {
        snapshots: traj.snapshots.iter().filter(|s| s.t >= a && s.t <= b).cloned().collect(),
        ..traj.clone()
    };
    if sub.snapshots.len() < 2 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for p in sub.snapshots.windows(2) {
        let x = lebesgue_norm(&p[0].u, 10.0)?;
        let y = lebesgue_norm(&p[1].u, 10.0)?;
        sum += 0.5 * (p[1].t - p[0].t) * (x * x + y * y);
    }
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{evolve, EvolveConfig};
    use crate::models::{free_state_gaussian, ModelSpec};
    use crate::radial_spectral::RadialGrid;
    use std::f64::consts::PI;

    fn gauss_state(n: usize, r_max: f64) -> State {
        let g = RadialGrid::new(n, r_max).unwrap();
        State::from_fns(g, 0.0, |r| (-0.5 * r * r).exp(), |_| 0.0)
    }

    #[test]
    fn gaussian_critical_norm() {
        let s = gauss_state(512, 30.0);
        let v = critical_norm(&s).unwrap();
        assert!((v - 2.0 * PI * 2f64.sqrt()).abs() < 1e-8, "{v}");
        assert_eq!(critical_norm(&State::zeros(s.grid().clone())).unwrap(), 0.0);
    }

    #[test]
    fn modulation_scale_is_covariant() {
        let s = gauss_state(1024, 60.0);
        let n1 = modulation_scale(&s).unwrap();
        assert!((0.5..=4.0).contains(&n1));
        let s4 = s.rescaled(4.0).unwrap();
        let n4 = modulation_scale(&s4).unwrap();
        assert!((n4 * 4.0 / n1 - 1.0).abs() < 0.1, "{n1} {n4}");
        assert!(compactness_tails(&State::zeros(s.grid().clone()), 0.1).is_err());
    }

    #[test]
    fn tails_meet_tolerance() {
        let s = gauss_state(512, 30.0);
        let rep = compactness_tails(&s, 0.1).unwrap();
        assert!(rep.c < rep.big_c);
        assert!(rep.low_fraction <= 0.1 && rep.high_fraction <= 0.1 && rep.far_fraction <= 0.1);
    }

    #[test]
    fn strichartz_of_zero_is_zero_and_window_checks() {
        let g = RadialGrid::new(64, 10.0).unwrap();
        let s = State::zeros(g);
        let traj = evolve(&ModelSpec::free(), &s, &EvolveConfig::new(0.01, 1.0)).unwrap();
        assert_eq!(strichartz_accumulate(&traj, (0.0, 1.0)).unwrap(), 0.0);
        assert!(strichartz_accumulate(&traj, (0.0, 2.0)).is_err());
    }

    #[test]
    fn local_window_shrinks_to_zero() {
        let g = RadialGrid::new(256, 20.0).unwrap();
        let s = free_state_gaussian(g, 0.01, 1.0);
        let traj = evolve(&ModelSpec::cubic_focusing(), &s, &EvolveConfig::new(0.01, 2.0)).unwrap();
        let mut prev = f64::INFINITY;
        for delta in [0.8, 0.4, 0.2, 0.1, 0.0] {
            let v = local_strichartz(&traj, 1.0, delta).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        assert_eq!(prev, 0.0);
    }
}
