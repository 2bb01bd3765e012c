//! Self-similar variables s = −log(T₊ − t), y = r/(T₊ − t), w = e^{−s}u.
//!
//! In these variables the radial equation becomes
//! w_ss + 3w_s + 2y w_sy = (1 − y²)Δw − 2w + F(y, w), and the energy
//! E(s) = ½∫w_s²y⁴/(1−y²) + ½∫w_y²y⁴ + ∫(w² + V(y, w))y⁴/(1−y²)
//! satisfies dE/ds = 2∫w_s²y⁴/(1−y²)² plus a flux through the cut y = 1 − ε.

pub mod cheb;
mod shoot;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{ensure_finite, Result, WaveLabError};
use crate::models::{ModelSpec, State};
use crate::radial_spectral::{RadialField, RadialGrid};
pub use cheb::{graded_rule, EvenCheb};
pub use shoot::{elliptic_shoot, elliptic_shoot_gbs, elliptic_shoot_profile, shoot_scan, ShootRow};

/// Relative size of u, u_t allowed outside the backward light cone.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Default cut ε at the light cone.
pub const DEFAULT_EPS: f64 = 1e-3;

/// (w, w_s) at one slow time on the even Chebyshev grid.
#[derive(Debug, Clone)]
pub struct SelfSimilarFrame {
    pub t_plus: f64,
    pub s: f64,
    pub cheb: Arc<EvenCheb>,
    pub w: Vec<f64>,
    pub w_s: Vec<f64>,
}

impl SelfSimilarFrame {
    pub fn from_fns<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(
        cheb: Arc<EvenCheb>,
        t_plus: f64,
        s: f64,
        w: F,
        w_s: G,
    ) -> Self {
        let wv = cheb.y.iter().map(|&y| w(y)).collect();
        let wsv = cheb.y.iter().map(|&y| w_s(y)).collect();
        Self { t_plus, s, cheb, w: wv, w_s: wsv }
    }

    pub fn y_grid(&self) -> &[f64] {
        &self.cheb.y
    }

    /// The physical time t = T₊ − e^{−s}.
    pub fn time(&self) -> f64 {
        self.t_plus - (-self.s).exp()
    }

    pub fn max_abs_diff(&self, other: &SelfSimilarFrame) -> f64 {
        self.w
            .iter()
            .zip(&other.w)
            .chain(self.w_s.iter().zip(&other.w_s))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Maps a state into self-similar variables about the blow-up time `t_plus`.
pub fn to_selfsimilar(state: &State, t_plus: f64, cheb: Arc<EvenCheb>) -> Result<SelfSimilarFrame> {
    let tau = t_plus - state.t;
    if !(tau > 0.0) {
        return Err(WaveLabError::InvalidArgument(format!("state time {} is not before T+ = {t_plus}", state.t)));
    }
    let grid = state.grid();
    if tau > grid.r_max() {
        return Err(WaveLabError::OutOfRange(format!("light cone radius {tau} exceeds r_max")));
    }
    let peak = state.u.max_abs().max(tau * state.ut.max_abs());
    let outside = grid
        .nodes()
        .iter()
        .zip(state.u.values().iter().zip(state.ut.values()))
        .filter(|(r, _)| **r > tau)
        .fold(0.0f64, |m, (_, (u, ut))| m.max(u.abs()).max(tau * ut.abs()));
    if outside > SUPPORT_TOL * peak {
        return Err(WaveLabError::Domain(format!(
            "data not supported in the backward light cone r <= {tau} (outside amplitude {outside:.2e})"
        )));
    }
    let r: Vec<f64> = cheb.y.iter().map(|y| tau * y).collect();
    let u = state.u.eval_at(&r);
    let ur = state.u.eval_dr_at(&r);
    let ut = state.ut.eval_at(&r);
    let w: Vec<f64> = u.iter().map(|v| tau * v).collect();
    let t2 = tau * tau;
    let w_s = (0..r.len()).map(|k| t2 * ut[k] - w[k] - t2 * cheb.y[k] * ur[k]).collect();
    Ok(SelfSimilarFrame { t_plus, s: -tau.ln(), cheb, w, w_s })
}

/// The state at t = T₊ − e^{−s} whose self-similar image is `frame`; zero outside the cone.
pub fn from_selfsimilar(frame: &SelfSimilarFrame, grid: &Arc<RadialGrid>) -> Result<State> {
    let tau = (-frame.s).exp();
    let c = &frame.cheb;
    let wy = c.apply(&c.d1, &frame.w);
    let u = RadialField::from_fn(grid.clone(), |r| if r <= tau { c.eval(&frame.w, r / tau) / tau } else { 0.0 });
    let ut = RadialField::from_fn(grid.clone(), |r| {
        if r <= tau {
            let y = r / tau;
            (c.eval(&frame.w, y) + c.eval(&frame.w_s, y) + y * c.eval_odd(&wy, y)) / (tau * tau)
        } else {
            0.0
        }
    });
    State::new(frame.t_plus - tau, u, ut)
}

/// Method-of-lines right-hand side of the w-equation.
#[derive(Debug, Clone)]
pub struct WFlow {
    pub model: ModelSpec,
    pub cheb: Arc<EvenCheb>,
    elliptic: Vec<f64>,
    advect: Vec<f64>,
}

impl WFlow {
    pub fn new(model: ModelSpec, cheb: Arc<EvenCheb>) -> Self {
        let n = cheb.len();
        let mut elliptic = cheb.lap.clone();
        let mut advect = cheb.d1.clone();
        for k in 0..n {
            let y = cheb.y[k];
            for l in 0..n {
                elliptic[k * n + l] *= 1.0 - y * y;
                advect[k * n + l] *= 2.0 * y;
            }
        }
        Self { model, cheb, elliptic, advect }
    }

    /// (∂_s w, ∂_s w_s).
    pub fn rhs(&self, w: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let ew = self.cheb.apply(&self.elliptic, w);
        let av = self.cheb.apply(&self.advect, v);
        let acc = (0..w.len())
            .map(|k| -3.0 * v[k] - av[k] + ew[k] - 2.0 * w[k] + self.model.force(self.cheb.y[k], w[k]))
            .collect();
        (v.to_vec(), acc)
    }

    /// Classical RK4 from `frame` to `s_end` with step `ds`; returns every `stride`-th frame
    /// including the first and last.
    pub fn evolve(
        &self,
        frame: &SelfSimilarFrame,
        s_end: f64,
        ds: f64,
        stride: usize,
    ) -> Result<Vec<SelfSimilarFrame>> {
        if !(ds > 0.0 && s_end > frame.s && stride > 0) {
            return Err(WaveLabError::InvalidArgument("need ds > 0, s_end > s and stride > 0".into()));
        }
        let steps = ((s_end - frame.s) / ds).round().max(1.0) as usize;
        let h = (s_end - frame.s) / steps as f64;
        let mut out = vec![frame.clone()];
        let (mut w, mut v) = (frame.w.clone(), frame.w_s.clone());
        let comb = |a: &[f64], b: &[f64], c: f64| a.iter().zip(b).map(|(x, y)| x + c * y).collect::<Vec<f64>>();
        for step in 1..=steps {
            let (k1w, k1v) = self.rhs(&w, &v);
            let (k2w, k2v) = self.rhs(&comb(&w, &k1w, 0.5 * h), &comb(&v, &k1v, 0.5 * h));
            let (k3w, k3v) = self.rhs(&comb(&w, &k2w, 0.5 * h), &comb(&v, &k2v, 0.5 * h));
            let (k4w, k4v) = self.rhs(&comb(&w, &k3w, h), &comb(&v, &k3v, h));
            for k in 0..w.len() {
                w[k] += h / 6.0 * (k1w[k] + 2.0 * k2w[k] + 2.0 * k3w[k] + k4w[k]);
                v[k] += h / 6.0 * (k1v[k] + 2.0 * k2v[k] + 2.0 * k3v[k] + k4v[k]);
            }
            ensure_finite(&w, "self-similar evolution")?;
            if step % stride == 0 || step == steps {
                out.push(SelfSimilarFrame {
                    t_plus: frame.t_plus,
                    s: frame.s + step as f64 * h,
                    cheb: self.cheb.clone(),
                    w: w.clone(),
                    w_s: v.clone(),
                });
            }
        }
        Ok(out)
    }
}

/// The four terms of E(s) on [0, 1 − ε] and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyTerms {
    /// ½∫w_s²y⁴/(1−y²)
    pub kinetic: f64,
    /// ½∫w_y²y⁴
    pub gradient: f64,
    /// ∫w²y⁴/(1−y²)
    pub mass: f64,
    /// ∫V(y, w)y⁴/(1−y²), which is −¼∫w⁴y⁴/(1−y²) for the focusing cubic.
    pub potential: f64,
    pub total: f64,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(WaveLabError::InvalidArgument(format!("cut eps = {eps} must lie in (0, 0.5)")));
    }
    Ok(())
}

struct Sampled {
    y: Vec<f64>,
    q: Vec<f64>,
    w: Vec<f64>,
    wy: Vec<f64>,
    ws: Vec<f64>,
}

fn sample(frame: &SelfSimilarFrame, eps: f64) -> Sampled {
    let c = &frame.cheb;
    let (y, q) = graded_rule(eps);
    let wy_nodes = c.apply(&c.d1, &frame.w);
    let w = y.iter().map(|&x| c.eval(&frame.w, x)).collect();
    let wy = y.iter().map(|&x| c.eval_odd(&wy_nodes, x)).collect();
    let ws = y.iter().map(|&x| c.eval(&frame.w_s, x)).collect();
    Sampled { y, q, w, wy, ws }
}

/// E(s) of a frame for the given nonlinearity, cut at y = 1 − ε.
pub fn lyapunov_energy(model: &ModelSpec, frame: &SelfSimilarFrame, eps: f64) -> Result<EnergyTerms> {
    check_eps(eps)?;
    let p = sample(frame, eps);
    let mut t = EnergyTerms { kinetic: 0.0, gradient: 0.0, mass: 0.0, potential: 0.0, total: 0.0 };
    for i in 0..p.y.len() {
        let y = p.y[i];
        let y4 = y.powi(4) * p.q[i];
        let inv = 1.0 / (1.0 - y * y);
        t.kinetic += 0.5 * p.ws[i] * p.ws[i] * y4 * inv;
        t.gradient += 0.5 * p.wy[i] * p.wy[i] * y4;
        t.mass += p.w[i] * p.w[i] * y4 * inv;
        t.potential += model.potential(y, p.w[i]) * y4 * inv;
    }
    t.total = t.kinetic + t.gradient + t.mass + t.potential;
    if !t.total.is_finite() {
        return Err(WaveLabError::NonFinite("Lyapunov energy"));
    }
    Ok(t)
}

/// (2∫w_s²y⁴/(1−y²)², flux w_s w_y y⁴ − y⁵w_s²/(1−y²) at y = 1 − ε).
pub fn energy_rate(frame: &SelfSimilarFrame, eps: f64) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let p = sample(frame, eps);
    let dissipation = (0..p.y.len())
        .map(|i| {
            let y = p.y[i];
            2.0 * p.q[i] * p.ws[i] * p.ws[i] * y.powi(4) / (1.0 - y * y).powi(2)
        })
        .sum();
    let c = &frame.cheb;
    let b = 1.0 - eps;
    let wy = c.apply(&c.d1, &frame.w);
    let (vs, vy) = (c.eval(&frame.w_s, b), c.eval_odd(&wy, b));
    let flux = vs * vy * b.powi(4) - b.powi(5) * vs * vs / (1.0 - b * b);
    Ok((dissipation, flux))
}

/// One step of the monotonicity comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityRow {
    pub s: f64,
    pub energy: f64,
    /// (E(s + ds) − E(s))/ds.
    pub lhs: f64,
    /// Trapezoid average of dissipation plus flux over the step.
    pub rhs: f64,
    pub dissipation: f64,
    pub flux: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityTable {
    pub rows: Vec<MonotonicityRow>,
    /// max |lhs − rhs| over max dissipation (absolute when dissipation vanishes).
    pub max_mismatch: f64,
    pub nondecreasing: bool,
    pub min_increment: f64,
}

/// Compares the discrete energy change with the dissipation law along a frame sequence.
pub fn monotonicity_check(model: &ModelSpec, frames: &[SelfSimilarFrame], eps: f64) -> Result<MonotonicityTable> {
    if frames.len() < 2 {
        return Err(WaveLabError::InvalidArgument("need at least two frames".into()));
    }
    let energies: Vec<f64> =
        frames.iter().map(|f| lyapunov_energy(model, f, eps).map(|e| e.total)).collect::<Result<_>>()?;
    let rates: Vec<(f64, f64)> = frames.iter().map(|f| energy_rate(f, eps)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(frames.len() - 1);
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    let mut min_increment = f64::INFINITY;
    for k in 0..frames.len() - 1 {
        let ds = frames[k + 1].s - frames[k].s;
        let lhs = (energies[k + 1] - energies[k]) / ds;
        let d = 0.5 * (rates[k].0 + rates[k + 1].0);
        let fl = 0.5 * (rates[k].1 + rates[k + 1].1);
        worst = worst.max((lhs - d - fl).abs());
        peak = peak.max(d);
        min_increment = min_increment.min(energies[k + 1] - energies[k]);
        rows.push(MonotonicityRow { s: frames[k].s, energy: energies[k], lhs, rhs: d + fl, dissipation: d, flux: fl });
    }
    let scale = energies.iter().fold(0.0f64, |m, e| m.max(e.abs())).max(1.0);
    Ok(MonotonicityTable {
        rows,
        max_mismatch: if peak > 0.0 { worst / peak } else { worst },
        nondecreasing: min_increment >= -1e-12 * scale,
        min_increment,
    })
}

/// exp(1 − 1/(1 − x²)) on |x| < 1, zero outside; equals 1 at x = 0.
pub fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

/// The constant equilibrium plus `amplitude`·bump(y/`radius`), at rest.
pub fn perturbed_equilibrium(cheb: Arc<EvenCheb>, amplitude: f64, radius: f64) -> SelfSimilarFrame {
    let c = 2f64.sqrt();
    SelfSimilarFrame::from_fns(cheb, 1.0, 0.0, move |y| c + amplitude * bump(y / radius), |_| 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_spectral::RadialGrid;

    #[test]
    fn zero_state_gives_zero_frame() {
        let g = RadialGrid::new(64, 4.0).unwrap();
        let f = to_selfsimilar(&State::zeros(g), 1.0, Arc::new(EvenCheb::new(32))).unwrap();
        assert!(f.w.iter().chain(&f.w_s).all(|&v| v == 0.0));
        let e = lyapunov_energy(&ModelSpec::cubic_focusing(), &f, DEFAULT_EPS).unwrap();
        assert_eq!(e.total, 0.0);
    }

    #[test]
    fn map_round_trips() {
        let g = RadialGrid::new(512, 5.0).unwrap();
        let sig2 = 0.12f64 * 0.12;
        let s = State::from_fns(
            g.clone(),
            0.2,
            |r| (-r * r / (2.0 * sig2)).exp(),
            |r| (1.0 - r * r) * (-r * r / (2.0 * sig2)).exp(),
        );
        let cheb = Arc::new(EvenCheb::new(256));
        let f = to_selfsimilar(&s, 1.2, cheb.clone()).unwrap();
        assert!((f.s - 0.0).abs() < 1e-15);
        // w(y) = τ u(τ y) with τ = 1.
        for (y, w) in f.y_grid().iter().zip(&f.w) {
            assert!((w - (-y * y / (2.0 * sig2)).exp()).abs() < 1e-10);
        }
        let back = from_selfsimilar(&f, &g).unwrap();
        assert!((back.t - 0.2).abs() < 1e-15);
        let again = to_selfsimilar(&back, 1.2, cheb).unwrap();
        assert!(again.max_abs_diff(&f) < 1e-10, "{}", again.max_abs_diff(&f));
        for (a, b) in back.u.values().iter().zip(s.u.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn support_outside_cone_is_rejected() {
        let g = RadialGrid::new(128, 5.0).unwrap();
        let s = State::from_fns(g, 0.0, |r| (-r * r).exp(), |_| 0.0);
        assert!(matches!(to_selfsimilar(&s, 1.0, Arc::new(EvenCheb::new(16))), Err(WaveLabError::Domain(_))));
    }

    #[test]
    fn constant_equilibrium_is_fixed() {
        let cheb = Arc::new(EvenCheb::new(64));
        let f = perturbed_equilibrium(cheb.clone(), 0.0, 0.5);
        let flow = WFlow::new(ModelSpec::cubic_focusing(), cheb);
        let frames = flow.evolve(&f, 0.25, 1e-4, 500).unwrap();
        for fr in &frames {
            assert!(fr.max_abs_diff(&f) < 1e-8);
        }
        let tab = monotonicity_check(&ModelSpec::cubic_focusing(), &frames, DEFAULT_EPS).unwrap();
        for row in &tab.rows {
            assert!(row.lhs.abs() < 1e-8 && row.dissipation.abs() < 1e-12);
        }
        // At w = √2 the mass and potential densities are 2 and −1 per unit weight.
        let e = lyapunov_energy(&ModelSpec::cubic_focusing(), &f, DEFAULT_EPS).unwrap();
        assert!((e.mass + 2.0 * e.potential).abs() < 1e-10 * e.mass);
    }

    #[test]
    fn energy_is_monotone_along_perturbed_flow() {
        let cheb = Arc::new(EvenCheb::new(128));
        let f = perturbed_equilibrium(cheb.clone(), 0.01, 0.5);
        let model = ModelSpec::cubic_focusing();
        let flow = WFlow::new(model, cheb);
        let frames = flow.evolve(&f, 0.25, 2.5e-5, 400).unwrap();
        let tab = monotonicity_check(&model, &frames, DEFAULT_EPS).unwrap();
        assert!(tab.nondecreasing, "min increment {}", tab.min_increment);
        assert!(tab.max_mismatch < 0.02, "mismatch {}", tab.max_mismatch);
        // The perturbation stays inside y < 1 − ε over this range, so the flux is negligible.
        let peak = tab.rows.iter().fold(0.0f64, |m, r| m.max(r.dissipation));
        assert!(tab.rows.iter().all(|r| r.flux.abs() < 1e-2 * peak));
    }
}
