//! Time integration of (u, u_t) with blow-up detection.
//!
//! The default scheme is Strang splitting: a half kick u_t += (dt/2) F(r, u),
//! the exact spectral free flow over dt, and another half kick. A
//! conservative leapfrog finite-difference scheme on a uniform grid is kept
//! as an independent cross-check.

mod leapfrog;
mod strang;

use serde::{Deserialize, Serialize};

pub use leapfrog::FdSolver;
pub use strang::step;

use crate::error::{Result, WaveLabError};
use crate::models::{ModelSpec, State};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    StrangSpectral,
    LeapfrogFd,
}

/// Integration parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_linf")]
    pub blowup_linf: f64,
    #[serde(default = "default_norm")]
    pub blowup_norm: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    /// Radius containing the data support; checked against r_max − t_end.
    #[serde(default)]
    pub support_radius: Option<f64>,
    /// Points per grid node for the leapfrog grid.
    #[serde(default = "default_fd_refine")]
    pub fd_refine: usize,
}

fn default_linf() -> f64 {
    1e6
}
fn default_norm() -> f64 {
    1e4
}
fn default_stride() -> usize {
    1
}
fn default_fd_refine() -> usize {
    4
}

impl EvolveConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            scheme: Scheme::StrangSpectral,
            blowup_linf: default_linf(),
            blowup_norm: default_norm(),
            snapshot_stride: 1,
            support_radius: None,
            fd_refine: default_fd_refine(),
        }
    }

    pub fn validate(&self, state: &State) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(WaveLabError::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !self.t_end.is_finite() || self.t_end < state.t {
            return Err(WaveLabError::Config("t_end must be finite and not before the initial time".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(WaveLabError::Config("snapshot_stride must be at least 1".into()));
        }
        if self.scheme == Scheme::LeapfrogFd {
            let h = state.grid().r_max() / (self.fd_refine.max(1) * state.grid().n()) as f64;
            if self.dt > 0.5 * h {
                return Err(WaveLabError::Config(format!(
                    "leapfrog CFL violated: dt = {} > 0.5·h = {}",
                    self.dt,
                    0.5 * h
                )));
            }
        }
        if let Some(a) = self.support_radius {
            let reach = a + (self.t_end - state.t);
            if reach > state.grid().r_max() {
                return Err(WaveLabError::OutOfRange(format!(
                    "causal support reaches r = {reach:.3} beyond r_max = {}",
                    state.grid().r_max()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Blowup,
    Overflow,
}

/// Snapshots of an evolution plus the reason it stopped.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub model: ModelSpec,
    pub dt: f64,
    pub snapshot_stride: usize,
    pub snapshots: Vec<State>,
    pub termination: Termination,
    pub steps: usize,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
    pub fn last(&self) -> &State {
        self.snapshots.last().expect("trajectory holds the initial state")
    }
    /// Snapshot with time closest to t.
    pub fn nearest(&self, t: f64) -> &State {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .expect("trajectory holds the initial state")
    }
}

/// Iterates the configured scheme until t_end or a blow-up threshold.
pub fn evolve(model: &ModelSpec, state: &State, config: &EvolveConfig) -> Result<Trajectory> {
    model.validate()?;
    config.validate(state)?;
    if !state.is_finite() {
        return Err(WaveLabError::NonFinite("initial state"));
    }
    match config.scheme {
        Scheme::StrangSpectral => strang::run(model, state, config),
        Scheme::LeapfrogFd => leapfrog::run(model, state, config),
    }
}

/// Number of steps and the uniform step that reach t_end exactly.
pub(crate) fn step_plan(t0: f64, t_end: f64, dt: f64) -> (usize, f64) {
    let span = t_end - t0;
    if span <= 0.0 {
        return (0, dt);
    }
    let k = (span / dt - 1e-9).ceil().max(1.0) as usize;
    (k, span / k as f64)
}

/// Observed temporal order of accuracy.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub order: f64,
    /// All errors sit at the transform round-off floor.
    pub exact: bool,
}

/// Richardson-style order estimate against a reference run at dt_min/8.
pub fn convergence_order(model: &ModelSpec, state: &State, dt_list: &[f64], t_end: f64) -> Result<ConvergenceReport> {
    if dt_list.len() < 2 {
        return Err(WaveLabError::InvalidArgument("need at least two time steps".into()));
    }
    let dt_min = dt_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut cfg = EvolveConfig::new(dt_min / 8.0, t_end);
    cfg.blowup_linf = f64::INFINITY;
    cfg.blowup_norm = f64::INFINITY;
    cfg.snapshot_stride = usize::MAX;
    let reference = evolve(model, state, &cfg)?;
    let u_ref = reference.last().u.clone();
    let norm = u_ref.integrate_r4(|_, v| v * v).sqrt().max(f64::MIN_POSITIVE);
    let mut errors = Vec::with_capacity(dt_list.len());
    for &dt in dt_list {
        let mut c = cfg;
        c.dt = dt;
        let run = evolve(model, state, &c)?;
        let diff = run.last().u.axpby(1.0, &u_ref, -1.0)?;
        errors.push(diff.integrate_r4(|_, v| v * v).sqrt() / norm);
    }
    let floor = 1e-12;
    if errors.iter().all(|e| *e < floor) {
        return Ok(ConvergenceReport { dts: dt_list.to_vec(), errors, order: f64::INFINITY, exact: true });
    }
    let x: Vec<f64> = dt_list.iter().map(|d| d.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| e.max(1e-300).ln()).collect();
    let (slope, _, _) = quad::linear_fit(&x, &y);
    Ok(ConvergenceReport { dts: dt_list.to_vec(), errors, order: slope, exact: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{energy, free_state_gaussian};
    use crate::radial_spectral::{free_propagate, RadialGrid};

    #[test]
    fn zero_state_stays_zero() {
        let g = RadialGrid::new(64, 10.0).unwrap();
        let s = State::zeros(g);
        let next = step(&ModelSpec::cubic_focusing(), &s, 0.01).unwrap();
        assert!(next.u.max_abs() == 0.0 && next.ut.max_abs() == 0.0);
    }

    #[test]
    fn free_model_step_is_free_propagation() {
        let g = RadialGrid::new(256, 20.0).unwrap();
        let s = free_state_gaussian(g, 0.5, 1.0);
        let a = step(&ModelSpec::free(), &s, 0.05).unwrap();
        let b = free_propagate(&s, 0.05).unwrap();
        for (x, y) in a.u.values().iter().zip(b.u.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn step_plan_hits_end_exactly() {
        let (k, h) = step_plan(0.0, 1.0, 0.3);
        assert_eq!(k, 4);
        assert!((h * k as f64 - 1.0).abs() < 1e-15);
        let (k, _) = step_plan(0.0, 1.0, 0.25);
        assert_eq!(k, 4);
    }

    #[test]
    fn times_strictly_increase_and_energy_is_kept() {
        let g = RadialGrid::new(256, 20.0).unwrap();
        let s = free_state_gaussian(g, 0.3, 1.0);
        let mut cfg = EvolveConfig::new(1e-2, 0.5);
        cfg.snapshot_stride = 5;
        let m = ModelSpec::cubic_focusing();
        let traj = evolve(&m, &s, &cfg).unwrap();
        assert_eq!(traj.termination, Termination::Completed);
        assert!(traj.times().windows(2).all(|p| p[0] < p[1]));
        let e0 = energy(&m, &s).unwrap();
        let e1 = energy(&m, traj.last()).unwrap();
        assert!(((e1 - e0) / e0).abs() < 1e-5);
    }

    #[test]
    fn causal_precheck_rejects_small_grids() {
        let g = RadialGrid::new(64, 5.0).unwrap();
        let s = State::zeros(g);
        let mut cfg = EvolveConfig::new(0.01, 4.0);
        cfg.support_radius = Some(2.0);
        assert!(evolve(&ModelSpec::free(), &s, &cfg).is_err());
    }

    #[test]
    fn leapfrog_agrees_with_splitting() {
        let g = RadialGrid::new(128, 16.0).unwrap();
        let s = free_state_gaussian(g, 0.3, 1.0);
        let m = ModelSpec::cubic_focusing();
        let mut a = EvolveConfig::new(5e-3, 1.0);
        a.snapshot_stride = usize::MAX;
        let mut b = a;
        b.scheme = Scheme::LeapfrogFd;
        b.dt = 2e-3;
        let x = evolve(&m, &s, &a).unwrap();
        let y = evolve(&m, &s, &b).unwrap();
        let d = x.last().u.axpby(1.0, &y.last().u, -1.0).unwrap();
        assert!(d.max_abs() < 2e-3 * x.last().u.max_abs(), "{}", d.max_abs());
    }
}
