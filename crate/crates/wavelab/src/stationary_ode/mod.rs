//! Autonomous reductions of the stationary equation in s = log r.
//!
//! Writing a stationary solution as u(r) = φ(log r)/r turns −Δu = F(r, u) on ℝ⁵
//! into φ̈ + φ̇ = g(φ). The singular profiles come from the one-dimensional
//! stable manifold of the origin, parameterized by φ(s) ≈ ℓe^{−2s} as s → ∞.

pub mod integrators;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveLabError};
use crate::models::ModelSpec;
use crate::quad::{least_squares, linear_fit};
use crate::radial_spectral::{RadialField, RadialGrid};
use integrators::{dopri5, gbs_fixed, Tolerances};

use std::cell::Cell;
use std::sync::Arc;

/// Which right-hand side g the reduction uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutonomousModel {
    /// g = 2x − x³, from the focusing cubic equation.
    Cubic,
    /// g = sin 2x, from the S³ wave map.
    PendulumSin,
    /// g = sinh 2x, from the H³ wave map.
    PendulumSinh,
}

impl AutonomousModel {
    pub fn g(self, x: f64) -> f64 {
        match self {
            Self::Cubic => 2.0 * x - x * x * x,
            Self::PendulumSin => (2.0 * x).sin(),
            Self::PendulumSinh => (2.0 * x).sinh(),
        }
    }

    pub fn g_prime(self, x: f64) -> f64 {
        match self {
            Self::Cubic => 2.0 - 3.0 * x * x,
            Self::PendulumSin => 2.0 * (2.0 * x).cos(),
            Self::PendulumSinh => 2.0 * (2.0 * x).cosh(),
        }
    }

    /// G with G' = g and G(0) = 0.
    pub fn primitive(self, x: f64) -> f64 {
        match self {
            Self::Cubic => x * x - 0.25 * x.powi(4),
            Self::PendulumSin => x.sin().powi(2),
            Self::PendulumSinh => x.sinh().powi(2),
        }
    }

    /// The planar vector field (ẋ, ẏ) = (y, −y + g(x)).
    pub fn rhs(self, x: f64, y: f64) -> (f64, f64) {
        (y, -y + self.g(x))
    }

    /// Coefficient a of the e^{−6s} correction in φ = ℓe^{−2s} + a e^{−6s} + ….
    pub fn seed_coefficient(self, ell: f64) -> f64 {
        let l3 = ell * ell * ell;
        match self {
            Self::Cubic => -l3 / 28.0,
            Self::PendulumSin => -l3 / 21.0,
            Self::PendulumSinh => l3 / 21.0,
        }
    }

    /// The ℝ⁵ model whose stationary equation this reduction encodes.
    pub fn elliptic_model(self) -> ModelSpec {
        match self {
            Self::Cubic => ModelSpec::cubic_focusing(),
            Self::PendulumSin => ModelSpec::wm_s3(),
            Self::PendulumSinh => ModelSpec::wm_h3(),
        }
    }
}

/// Rest points (x, 0) with |x| ≤ 20.
pub fn equilibria(model: AutonomousModel) -> Vec<(f64, f64)> {
    const BOUND: f64 = 20.0;
    match model {
        AutonomousModel::Cubic => {
            let r = 2f64.sqrt();
            vec![(-r, 0.0), (0.0, 0.0), (r, 0.0)]
        }
        AutonomousModel::PendulumSin => {
            let step = std::f64::consts::FRAC_PI_2;
            let kmax = (BOUND / step).floor() as i64;
            (-kmax..=kmax).map(|k| (k as f64 * step, 0.0)).collect()
        }
        AutonomousModel::PendulumSinh => vec![(0.0, 0.0)],
    }
}

/// Roots of g on [−20, 20] located by sign changes and bisection; an oracle
/// for [`equilibria`].
pub fn equilibria_by_root_search(model: AutonomousModel) -> Vec<f64> {
    let n = 40_000;
    let xs: Vec<f64> = (0..=n).map(|i| -20.0 + 40.0 * i as f64 / n as f64 + 1.234e-5).collect();
    let mut roots = Vec::new();
    for w in xs.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (model.g(a), model.g(b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if model.g(m).signum() == model.g(a).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

/// Eigenvalues (λ₊, λ₋) = (−1 ± √(1 + 4g'(x)))/2 of the linearization at (x, 0).
pub fn jacobian_eigenvalues(model: AutonomousModel, x: f64) -> (Complex64, Complex64) {
    let disc = Complex64::new(1.0 + 4.0 * model.g_prime(x), 0.0).sqrt();
    ((-1.0 + disc) / 2.0, (-1.0 - disc) / 2.0)
}

/// Settings for the backward integration along the stable manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ManifoldOptions {
    /// Size of |ℓ|e^{−2s₀} at the seed point.
    pub seed_amplitude: f64,
    pub rtol: f64,
    pub atol: f64,
    /// |φ| above which the trajectory counts as escaped.
    pub escape: f64,
    /// Spacing of the stored s-samples.
    pub ds: f64,
}

impl Default for ManifoldOptions {
    fn default() -> Self {
        Self { seed_amplitude: 1e-6, rtol: 1e-12, atol: 1e-24, escape: 50.0, ds: 1.0 / 32.0 }
    }
}

/// A trajectory on the stable manifold of the origin.
///
/// Samples run from `s_max` down to `s_min`. `tail_energy[i]` is ∫_{s_i}^∞ φ̇² and
/// `l5[i]` is ∫_{s_i}^{s_max} |φ|⁵.
#[derive(Debug, Clone)]
pub struct ManifoldProfile {
    pub model: AutonomousModel,
    pub ell: f64,
    pub s_max: f64,
    pub s_min: f64,
    pub s_grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub phidot: Vec<f64>,
    pub tail_energy: Vec<f64>,
    pub l5: Vec<f64>,
    pub options: ManifoldOptions,
}

impl ManifoldProfile {
    /// Seed state [φ, φ̇, ∫_{s₀}^∞ φ̇², 0] from the two-term expansion.
    fn seed(&self) -> [f64; 4] {
        let (ell, a, s0) = (self.ell, self.model.seed_coefficient(self.ell), self.s_max);
        let e2 = (-2.0 * s0).exp();
        let e6 = (-6.0 * s0).exp();
        let phi = ell * e2 + a * e6;
        let phidot = -2.0 * ell * e2 - 6.0 * a * e6;
        // ∫_{s₀}^∞ (2ℓe^{−2s} + 6ae^{−6s})² ds
        let tail = ell * ell * e2 * e2 + 3.0 * ell * a * e2 * e6 + 3.0 * a * a * e6 * e6;
        [phi, phidot, tail, 0.0]
    }

    /// Re-integrates from the seed and returns [φ, φ̇, ∫φ̇², ∫|φ|⁵] at each s.
    /// Points may come in any order but must lie in [s_min, s_max].
    pub fn sample(&self, s_points: &[f64]) -> Result<Vec<[f64; 4]>> {
        if self.ell == 0.0 {
            return Ok(vec![[0.0; 4]; s_points.len()]);
        }
        let tiny = 1e-12 * (1.0 + self.s_min.abs().max(self.s_max.abs()));
        if let Some(s) = s_points.iter().find(|&&s| !(s >= self.s_min - tiny && s <= self.s_max + tiny)) {
            return Err(WaveLabError::OutOfRange(format!(
                "s = {s} outside the integrated range [{}, {}]",
                self.s_min, self.s_max
            )));
        }
        let mut order: Vec<usize> = (0..s_points.len()).collect();
        order.sort_by(|&a, &b| s_points[b].total_cmp(&s_points[a]));
        let sorted: Vec<f64> = order.iter().map(|&i| s_points[i].min(self.s_max)).collect();
        let vals = integrate(self.model, self.s_max, self.seed(), &sorted, &self.options)?;
        let mut out = vec![[0.0; 4]; s_points.len()];
        for (k, &i) in order.iter().enumerate() {
            out[i] = vals[k];
        }
        Ok(out)
    }

    /// φ_ℓ(r) = φ(log r)/r at the given radii.
    pub fn physical_at(&self, r: &[f64]) -> Result<Vec<f64>> {
        let s: Vec<f64> = r.iter().map(|x| x.ln()).collect();
        let v = self.sample(&s)?;
        Ok(r.iter().zip(&v).map(|(x, y)| y[0] / x).collect())
    }
}

fn field(model: AutonomousModel) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    move |_s, y| [y[1], -y[1] + model.g(y[0]), -y[1] * y[1], -y[0].abs().powi(5)]
}

fn integrate(
    model: AutonomousModel,
    s0: f64,
    y0: [f64; 4],
    outputs: &[f64],
    opts: &ManifoldOptions,
) -> Result<Vec<[f64; 4]>> {
    let bound = opts.escape;
    let tol = Tolerances { rtol: opts.rtol, atol: opts.atol, ..Default::default() };
    let last = Cell::new(s0);
    dopri5(field(model), s0, y0, outputs, tol, |s, y| {
        last.set(s);
        (!(y[0].abs() <= bound)).then_some(WaveLabError::Escape { s, bound })
    })
    .map_err(|e| match e {
        // The vector field is smooth, so a collapsing step size means the
        // solution is running into a singularity at finite s.
        WaveLabError::Integrator(_) => WaveLabError::Escape { s: last.get(), bound },
        other => other,
    })
}

/// Integrates the stable-manifold trajectory with parameter ℓ from its seed
/// point down to `s_min`.
pub fn stable_manifold(model: AutonomousModel, ell: f64, s_min: f64, opts: ManifoldOptions) -> Result<ManifoldProfile> {
    if !ell.is_finite() {
        return Err(WaveLabError::InvalidArgument("ell must be finite".into()));
    }
    if !(s_min <= 0.0) {
        return Err(WaveLabError::InvalidArgument(format!("s_min = {s_min} must be <= 0")));
    }
    if !(opts.ds > 0.0 && opts.seed_amplitude > 0.0 && opts.seed_amplitude <= 1e-3) {
        return Err(WaveLabError::InvalidArgument("ds and seed_amplitude must be positive and small".into()));
    }
    let s_max = if ell == 0.0 { 0.0 } else { (0.5 * (ell.abs() / opts.seed_amplitude).ln()).max(0.0) };
    let count = ((s_max - s_min) / opts.ds).floor() as usize;
    let mut s_grid: Vec<f64> = (0..=count).map(|i| s_max - i as f64 * opts.ds).collect();
    if *s_grid.last().unwrap() > s_min {
        s_grid.push(s_min);
    }
    let mut profile = ManifoldProfile {
        model,
        ell,
        s_max,
        s_min,
        s_grid: s_grid.clone(),
        phi: vec![0.0; s_grid.len()],
        phidot: vec![0.0; s_grid.len()],
        tail_energy: vec![0.0; s_grid.len()],
        l5: vec![0.0; s_grid.len()],
        options: opts,
    };
    if ell == 0.0 {
        return Ok(profile);
    }
    let vals = integrate(model, s_max, profile.seed(), &s_grid, &opts)?;
    for (i, v) in vals.iter().enumerate() {
        profile.phi[i] = v[0];
        profile.phidot[i] = v[1];
        profile.tail_energy[i] = v[2];
        profile.l5[i] = v[3];
    }
    Ok(profile)
}

/// φ(s) from the same seed by fixed-step extrapolation, independent of the
/// adaptive integrator.
pub fn gbs_value(profile: &ManifoldProfile, s: f64, macro_steps: usize) -> f64 {
    if profile.ell == 0.0 {
        return 0.0;
    }
    let model = profile.model;
    let f = move |_t: f64, y: &[f64; 2]| [y[1], -y[1] + model.g(y[0])];
    let seed = profile.seed();
    gbs_fixed(f, profile.s_max, [seed[0], seed[1]], s, macro_steps, 8)[0]
}

/// φ_ℓ(r) = φ(log r)/r on the nodes of a grid.
pub fn physical_profile(profile: &ManifoldProfile, grid: &Arc<RadialGrid>) -> Result<RadialField> {
    let nodes = grid.nodes();
    let (lo, hi) = (profile.s_min.exp(), profile.s_max.exp());
    if profile.ell != 0.0 && (nodes[0] < lo || nodes[nodes.len() - 1] > hi) {
        return Err(WaveLabError::OutOfRange(format!(
            "grid spans [{:.3e}, {:.3e}] but the profile covers r in [{lo:.3e}, {hi:.3e}]",
            nodes[0],
            nodes[nodes.len() - 1]
        )));
    }
    RadialField::new(grid.clone(), profile.physical_at(nodes)?)
}

/// Largest relative residual of −u'' − (4/r)u' − F(r, u) over the given radii,
/// with derivatives from five-point differences of step 1e-3·r.
pub fn elliptic_residual(profile: &ManifoldProfile, radii: &[f64]) -> Result<f64> {
    if profile.ell == 0.0 {
        return Ok(0.0);
    }
    let model = profile.model.elliptic_model();
    let mut pts = Vec::with_capacity(5 * radii.len());
    for &r in radii {
        let h = 1e-3 * r;
        pts.extend((-2..=2).map(|k| r + k as f64 * h));
    }
    let u = profile.physical_at(&pts)?;
    let mut worst = 0.0f64;
    for (i, &r) in radii.iter().enumerate() {
        let h = 1e-3 * r;
        let w = &u[5 * i..5 * i + 5];
        let d1 = (w[0] - 8.0 * w[1] + 8.0 * w[3] - w[4]) / (12.0 * h);
        let d2 = (-w[0] + 16.0 * w[1] - 30.0 * w[2] + 16.0 * w[3] - w[4]) / (12.0 * h * h);
        let force = model.force(r, w[2]);
        let res = -d2 - 4.0 * d1 / r - force;
        let scale = d2.abs().max((4.0 * d1 / r).abs()).max(force.abs());
        if scale > 0.0 {
            worst = worst.max(res.abs() / scale);
        }
    }
    Ok(worst)
}

/// Fitted coefficient a in φ = x + (a/ℓ³)x³ + O(x⁵), x = ℓe^{−2s}, measured on
/// |x| ∈ [1e-2, 0.2].
pub fn measured_seed_coefficient(profile: &ManifoldProfile) -> Result<f64> {
    let ell = profile.ell;
    if ell == 0.0 {
        return Err(WaveLabError::IllPosed("ell = 0 has no expansion".into()));
    }
    let (s_lo, s_hi) = (0.5 * (ell.abs() / 0.2).ln(), 0.5 * (ell.abs() / 1e-2).ln());
    let m = 80;
    let s: Vec<f64> = (0..m).map(|i| s_lo + (s_hi - s_lo) * i as f64 / (m - 1) as f64).collect();
    let vals = profile.sample(&s)?;
    let mut design = Vec::with_capacity(6 * m);
    let mut y = Vec::with_capacity(m);
    for (si, v) in s.iter().zip(&vals) {
        let x = ell * (-2.0 * si).exp();
        let x2 = x * x;
        let mut p = 1.0;
        for _ in 0..6 {
            design.push(p);
            p *= x2;
        }
        y.push((v[0] - x) / (x2 * x));
    }
    let (coef, _) = least_squares(&design, 6, &y)?;
    Ok(coef[0] * ell * ell * ell)
}

/// Largest |−φ̇² + 2∫_s^∞ φ̇² + 2G(φ)| over the stored samples.
pub fn ode_energy_identity(profile: &ManifoldProfile) -> f64 {
    (0..profile.s_grid.len())
        .map(|i| {
            let p = profile.phidot[i];
            (-p * p + 2.0 * profile.tail_energy[i] + 2.0 * profile.model.primitive(profile.phi[i])).abs()
        })
        .fold(0.0, f64::max)
}

/// I(ε) = ∫_ε^1 |φ_ℓ|⁵ r⁴ dr against log(1/ε), with a linear fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L5Table {
    pub eps: Vec<f64>,
    pub integral: Vec<f64>,
    /// Fitted slope c in I ≈ c·log(1/ε) + d.
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// I(ε/10) − I(ε) for consecutive decades of the sorted list.
    pub decade_increments: Vec<f64>,
}

pub fn l5_divergence(profile: &ManifoldProfile, eps_list: &[f64]) -> Result<L5Table> {
    if profile.ell == 0.0 {
        return Err(WaveLabError::IllPosed("ell = 0: the profile vanishes and the divergence claim is vacuous".into()));
    }
    if eps_list.len() < 2 || eps_list.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(WaveLabError::InvalidArgument("need at least two eps values in (0, 1)".into()));
    }
    let mut eps = eps_list.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    let mut s: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    s.push(0.0);
    let vals = profile.sample(&s)?;
    let base = vals[vals.len() - 1][3];
    let integral: Vec<f64> = vals[..eps.len()].iter().map(|v| v[3] - base).collect();
    let x: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&x, &integral);
    let decade_increments = integral.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(L5Table { eps, integral, slope, intercept, r2, decade_increments })
}

/// Log-log slope of |r³φ_ℓ(r) − ℓ| over 20 log-spaced radii in `window`.
pub fn far_field_slope(profile: &ManifoldProfile, window: (f64, f64)) -> Result<f64> {
    if profile.ell == 0.0 {
        return Err(WaveLabError::IllPosed("ell = 0: the profile vanishes identically".into()));
    }
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(WaveLabError::InvalidArgument(format!("slope window ({lo}, {hi}) must satisfy 0 < lo < hi")));
    }
    let r: Vec<f64> = (0..20).map(|i| lo * (hi / lo).powf(i as f64 / 19.0)).collect();
    let v = profile.physical_at(&r)?;
    let x: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let y: Vec<f64> = r.iter().zip(&v).map(|(r, u)| (r.powi(3) * u - profile.ell).abs().ln()).collect();
    Ok(linear_fit(&x, &y).0)
}

/// Vector field samples (x, y, ẋ, ẏ) on a regular grid for plotting.
pub fn phase_portrait(model: AutonomousModel, x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Vec<[f64; 4]> {
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        let xi = x.0 + (x.1 - x.0) * i as f64 / (nx.max(2) - 1) as f64;
        for j in 0..ny {
            let yj = y.0 + (y.1 - y.0) * j as f64 / (ny.max(2) - 1) as f64;
            let (dx, dy) = model.rhs(xi, yj);
            out.push([xi, yj, dx, dy]);
        }
    }
    out
}
