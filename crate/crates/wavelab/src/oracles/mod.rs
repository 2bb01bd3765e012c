//! Slow reference computations that certify the production paths.
//!
//! Each oracle uses a different method from the code it checks: composite
//! panel quadrature instead of the global Gauss rule for transforms, fixed-step
//! extrapolation instead of adaptive Runge–Kutta for ODEs, and hyper-dual
//! derivatives instead of finite differences for closed-form solutions.

pub mod hyperdual;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveLabError};
use crate::models::ModelSpec;
use crate::quad::{gauss_legendre_on, CompositeRule};
use crate::radial_spectral::{RadialGrid, SpectralField, OMEGA4};
use crate::selfsimilar::elliptic_shoot_gbs;
use crate::stationary_ode::{gbs_value, ManifoldProfile};
use hyperdual::HyperDual;

/// Oracle settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    /// Points per production point (at least 4).
    pub refinement: usize,
    pub transform_tol: f64,
    pub ode_tol: f64,
    pub residual_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { refinement: 8, transform_tol: 1e-8, ode_tol: 1e-9, residual_tol: 1e-12 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.refinement < 4 {
            return Err(WaveLabError::Config(format!("oracle refinement {} must be at least 4", self.refinement)));
        }
        Ok(())
    }
}

/// One production/oracle comparison, serialized as a JSON report line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub case: String,
    pub production_value: f64,
    pub oracle_value: f64,
    pub rel_diff: f64,
}

impl OracleReport {
    pub fn new(case: impl Into<String>, production_value: f64, oracle_value: f64) -> Self {
        let scale = oracle_value.abs().max(f64::MIN_POSITIVE);
        let diff = (production_value - oracle_value).abs();
        let rel_diff = if diff == 0.0 { 0.0 } else { diff / scale };
        Self { case: case.into(), production_value, oracle_value, rel_diff }
    }
}

/// k(z) from its angular integral (3/4)∫₀^π cos(z cos θ) sin³θ dθ, used where
/// the closed form suffers cancellation.
fn reference_kernel(z: f64) -> f64 {
    thread_local! {
        static RULE: (Vec<f64>, Vec<f64>) = gauss_legendre_on(40, -1.0, 1.0);
    }
    if z.abs() >= 1.0 {
        return OMEGA4 * 3.0 * (z.sin() - z * z.cos()) / (z * z * z);
    }
    // With x = cos θ the integral is ∫_{−1}^{1} cos(zx)(1 − x²) dx.
    RULE.with(|(x, w)| OMEGA4 * 0.75 * x.iter().zip(w).map(|(x, w)| w * (z * x).cos() * (1.0 - x * x)).sum::<f64>())
}

/// Forward transform of f at the grid's frequency nodes, by a composite
/// 16-point rule with `refinement` times as many points as the grid.
pub fn oracle_transform<F: Fn(f64) -> f64 + Sync>(
    f: F,
    grid: &Arc<RadialGrid>,
    config: &OracleConfig,
) -> Result<SpectralField> {
    config.validate()?;
    let panels = (config.refinement * grid.n()).div_ceil(16);
    let rule = CompositeRule::new(0.0, grid.r_max(), panels, 16);
    let fr: Vec<f64> = rule.nodes.iter().zip(&rule.weights).map(|(&r, w)| w * f(r) * r.powi(4)).collect();
    let values = grid
        .freq_nodes()
        .par_iter()
        .map(|&rho| rule.nodes.iter().zip(&fr).map(|(&r, v)| v * reference_kernel(rho * r)).sum())
        .collect();
    SpectralField::new(grid.clone(), values)
}

/// φ(s) on a stable manifold by fixed-step extrapolation.
pub fn oracle_manifold(profile: &ManifoldProfile, s: f64, config: &OracleConfig) -> f64 {
    let macro_steps = (50.0 * config.refinement as f64 * (profile.s_max - s).abs()).ceil().max(1.0) as usize;
    gbs_value(profile, s, macro_steps)
}

/// Terminal shooting values by fixed-step extrapolation.
pub fn oracle_shoot(model: &ModelSpec, a: f64, eps: f64, config: &OracleConfig) -> Result<(f64, f64)> {
    elliptic_shoot_gbs(model, a, eps, 500 * config.refinement)
}

/// Closed-form solutions whose residual can be checked exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// φ_T(t) = √2/(T − t) in φ_tt = φ³; the point is (t, T).
    PhiT,
    /// ψ = 2 arctan(r/t) in ψ_tt − ψ_rr − (2/r)ψ_r + sin 2ψ/r² = 0; the point is (t, r).
    TurokSpergel,
    /// r⁻³ in Δ = ∂_rr + (4/r)∂_r; the point is (t, r).
    PlaneR3,
    /// t r⁻³ in the free wave operator; the point is (t, r).
    PlaneTR3,
}

/// Residual of a closed-form solution in its equation, relative to the largest term.
pub fn closed_form_residual(which: ClosedForm, point: (f64, f64)) -> Result<f64> {
    let (t, x) = point;
    let hd = HyperDual::variable;
    let k = HyperDual::constant;
    match which {
        ClosedForm::PhiT => {
            let big_t = x;
            if !(t < big_t) {
                return Err(WaveLabError::Domain(format!("phi_T needs t < T (t = {t}, T = {big_t})")));
            }
            let phi = (k(big_t) - hd(t)).recip() * 2f64.sqrt();
            let lhs = phi.second();
            let rhs = phi.a.powi(3);
            Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()))
        }
        ClosedForm::TurokSpergel => {
            if !(t > 0.0 && x > 0.0) {
                return Err(WaveLabError::Domain(format!(
                    "explicit wave map needs t > 0 and r > 0 (t = {t}, r = {x})"
                )));
            }
            let in_t = (k(x) / hd(t)).atan() * 2.0;
            let in_r = (hd(x) / k(t)).atan() * 2.0;
            let psi = in_r.a;
            let terms = [in_t.second(), -in_r.second(), -2.0 / x * in_r.first(), (2.0 * psi).sin() / (x * x)];
            Ok(relative_sum(&terms))
        }
        ClosedForm::PlaneR3 | ClosedForm::PlaneTR3 => {
            if !(x > 0.0) {
                return Err(WaveLabError::Domain(format!("plane solutions need r > 0 (r = {x})")));
            }
            let time = if which == ClosedForm::PlaneTR3 { t } else { 1.0 };
            let v_r = hd(x).powi(-3) * time;
            let mut terms = vec![v_r.second(), 4.0 / x * v_r.first()];
            if which == ClosedForm::PlaneTR3 {
                let v_t = hd(t) * x.powi(-3);
                terms.push(-v_t.second());
            }
            Ok(relative_sum(&terms))
        }
    }
}

fn relative_sum(terms: &[f64]) -> f64 {
    let sum: f64 = terms.iter().sum();
    let scale = terms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        0.0
    } else {
        sum.abs() / scale
    }
}

/// Richardson extrapolation of values computed at steps h, h/ratio with error O(h^order).
pub fn richardson(coarse: f64, fine: f64, ratio: f64, order: f64) -> f64 {
    let f = ratio.powf(order);
    (f * fine - coarse) / (f - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_spectral::{forward_transform, RadialField};
    use crate::stationary_ode::{stable_manifold, AutonomousModel, ManifoldOptions};
    use std::f64::consts::PI;

    #[test]
    fn transform_oracle_matches_gaussian_identity() {
        let g = RadialGrid::new(128, 16.0).unwrap();
        let cfg = OracleConfig::default();
        let spec = oracle_transform(|r| (-0.5 * r * r).exp(), &g, &cfg).unwrap();
        for (rho, v) in g.freq_nodes().iter().zip(spec.values()) {
            let exact = (2.0 * PI).powf(2.5) * (-0.5 * rho * rho).exp();
            assert!((v - exact).abs() < 1e-11 * (2.0 * PI).powf(2.5), "{rho} {v} {exact}");
        }
        let prod = forward_transform(&RadialField::from_fn(g.clone(), |r| (-0.5 * r * r).exp())).unwrap();
        for (a, b) in prod.values().iter().zip(spec.values()) {
            assert!((a - b).abs() < 1e-8 * (2.0 * PI).powf(2.5));
        }
        let zero = oracle_transform(|_| 0.0, &g, &cfg).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        assert!(oracle_transform(|_| 0.0, &g, &OracleConfig { refinement: 2, ..cfg }).is_err());
    }

    #[test]
    fn reference_kernel_matches_closed_form() {
        for z in [0.0, 1e-3, 0.3, 0.7, 0.99] {
            let closed = OMEGA4 * crate::radial_spectral::reduced_kernel(z);
            assert!((reference_kernel(z) - closed).abs() < 1e-14 * OMEGA4);
        }
    }

    #[test]
    fn closed_forms_have_zero_residual() {
        assert!(closed_form_residual(ClosedForm::PhiT, (0.3, 1.0)).unwrap() < 1e-12);
        assert!(closed_form_residual(ClosedForm::TurokSpergel, (1.3, 0.7)).unwrap() < 1e-12);
        assert!(closed_form_residual(ClosedForm::PlaneR3, (0.0, 2.5)).unwrap() < 1e-12);
        assert!(closed_form_residual(ClosedForm::PlaneTR3, (1.7, 0.4)).unwrap() < 1e-12);
        assert!(closed_form_residual(ClosedForm::PhiT, (1.0, 1.0)).is_err());
        assert!(closed_form_residual(ClosedForm::TurokSpergel, (0.0, 1.0)).is_err());
    }

    #[test]
    fn ode_oracles_agree_with_production() {
        let cfg = OracleConfig::default();
        let p = stable_manifold(AutonomousModel::PendulumSin, 1.0, -1.0, ManifoldOptions::default()).unwrap();
        let s = 0.5;
        let prod = p.sample(&[s]).unwrap()[0][0];
        assert!((prod - oracle_manifold(&p, s, &cfg)).abs() < cfg.ode_tol);
        let m = ModelSpec::cubic_focusing();
        let (w, _) = oracle_shoot(&m, 2f64.sqrt(), 1e-2, &cfg).unwrap();
        assert!((w - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(oracle_shoot(&m, 0.0, 1e-2, &cfg).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn richardson_removes_leading_error() {
        let f = |h: f64| 1.0 + 3.0 * h * h;
        assert!((richardson(f(0.1), f(0.05), 2.0, 2.0) - 1.0).abs() < 1e-14);
    }
}
