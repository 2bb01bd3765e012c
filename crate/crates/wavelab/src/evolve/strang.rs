use super::{step_plan, EvolveConfig, Termination, Trajectory};
use crate::error::{Result, WaveLabError};
use crate::models::{ModelSpec, State};
use crate::quad;
use crate::radial_spectral::rotate_free;
use crate::radial_spectral::{RadialField, RadialGrid, INV_TWO_PI_5, OMEGA4};

fn kick(model: &ModelSpec, grid: &RadialGrid, u: &[f64], ut: &mut [f64], h: f64) {
    if matches!(model.kind, crate::models::ModelKind::Free) {
        return;
    }
    for ((&r, &x), v) in grid.nodes().iter().zip(u).zip(ut.iter_mut()) {
        *v += h * model.force(r, x);
    }
}

/// One Strang step; returns the new fields and the squared critical norm
/// measured on the spectral coefficients of the free stage.
fn raw_step(model: &ModelSpec, grid: &RadialGrid, u: &[f64], ut: &[f64], dt: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let n = grid.n();
    let mut ut = ut.to_vec();
    kick(model, grid, u, &mut ut, 0.5 * dt);
    let (uh, uth) = quad::matvec2(grid.forward_matrix(), n, u, &ut);
    let (a, b) = rotate_free(grid, &uh, &uth, dt);
    let mut crit2 = 0.0;
    for ((&p, &w), (&x, &y)) in grid.freq_nodes().iter().zip(grid.freq_weights()).zip(a.iter().zip(&b)) {
        crit2 += w * (p * p * p * x * x + p * y * y);
    }
    crit2 *= INV_TWO_PI_5 * OMEGA4;
    let (u_new, mut ut_new) = quad::matvec2(grid.inverse_matrix(), n, &a, &b);
    kick(model, grid, &u_new, &mut ut_new, 0.5 * dt);
    (u_new, ut_new, crit2)
}

/// One step of the splitting scheme.
pub fn step(model: &ModelSpec, state: &State, dt: f64) -> Result<State> {
    if !state.is_finite() {
        return Err(WaveLabError::NonFinite("step input"));
    }
    let grid = state.grid().clone();
    let (u, ut, _) = raw_step(model, &grid, state.u.values(), state.ut.values(), dt);
    if !(u.iter().all(|v| v.is_finite()) && ut.iter().all(|v| v.is_finite())) {
        return Err(WaveLabError::Domain("overflow during step (blow-up signal)".into()));
    }
    State::new(state.t + dt, RadialField::from_raw(grid.clone(), u), RadialField::from_raw(grid, ut))
}

pub(super) fn run(model: &ModelSpec, state: &State, config: &EvolveConfig) -> Result<Trajectory> {
    let grid = state.grid().clone();
    let (k, h) = step_plan(state.t, config.t_end, config.dt);
    let mut snapshots = vec![state.clone()];
    let mut u = state.u.values().to_vec();
    let mut ut = state.ut.values().to_vec();
    let mut termination = Termination::Completed;
    let mut steps = 0;
    for i in 1..=k {
        let (nu, nut, crit2) = raw_step(model, &grid, &u, &ut, h);
        let t = state.t + i as f64 * h;
        if !(nu.iter().all(|v| v.is_finite()) && nut.iter().all(|v| v.is_finite())) {
            termination = Termination::Overflow;
            break;
        }
        u = nu;
        ut = nut;
        steps = i;
        let linf = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let blown = linf > config.blowup_linf || crit2.sqrt() > config.blowup_norm;
        if blown || i == k || i % config.snapshot_stride == 0 {
            snapshots.push(State {
                t,
                u: RadialField::from_raw(grid.clone(), u.clone()),
                ut: RadialField::from_raw(grid.clone(), ut.clone()),
            });
        }
        if blown {
            termination = Termination::Blowup;
            break;
        }
    }
    if termination == Termination::Overflow {
        // Keep the last finite state as the final snapshot.
        let t = state.t + steps as f64 * h;
        if snapshots.last().map(|s| s.t) != Some(t) {
            snapshots.push(State { t, u: RadialField::from_raw(grid.clone(), u), ut: RadialField::from_raw(grid, ut) });
        }
    }
    Ok(Trajectory { model: *model, dt: h, snapshot_stride: config.snapshot_stride, snapshots, termination, steps })
}
