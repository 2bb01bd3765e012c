//! Nonlinearities F(r, u), conserved energies and closed-form solutions.
//!
//! Every model is written as u_tt − u_rr − (4/r) u_r = F(r, u) on ℝ⁵ with
//! F = −∂V/∂u, so that E = ∫ [½(u_t² + u_r²) + V(r, u)] r⁴ dr is conserved.
//! The wave-map models use u = ψ/r for the 1-equivariant reduction.

pub mod data;
mod exact;
mod series;
mod state;

use serde::{Deserialize, Serialize};

pub use data::free_state_gaussian;
pub use exact::{exact_ode_blowup, turok_spergel, turok_spergel_u};
pub use series::{g_h3, g_s3, z_h3, z_s3};
pub use state::State;

use crate::error::{Result, WaveLabError};
use crate::radial_spectral::{forward_transform, RadialField, INV_TWO_PI_5};

/// Which nonlinearity a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    CubicFocusing,
    CubicDefocusing,
    Power {
        p: f64,
        sign: f64,
        #[serde(default)]
        allow_subcritical: bool,
    },
    WmS3,
    WmH3,
    /// F ≡ 0, the free wave equation.
    Free,
}

/// A nonlinearity family plus the optional exterior cutoff χ_R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

/// |ru| above which sinh(2ru) overflows in the H³ model.
pub const H3_OVERFLOW: f64 = 350.0;

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        Self { kind, cutoff: None }
    }
    pub fn cubic_focusing() -> Self {
        Self::new(ModelKind::CubicFocusing)
    }
    pub fn cubic_defocusing() -> Self {
        Self::new(ModelKind::CubicDefocusing)
    }
    pub fn power(p: f64, sign: f64) -> Result<Self> {
        let m = Self::new(ModelKind::Power { p, sign, allow_subcritical: false });
        m.validate()?;
        Ok(m)
    }
    pub fn wm_s3() -> Self {
        Self::new(ModelKind::WmS3)
    }
    pub fn wm_h3() -> Self {
        Self::new(ModelKind::WmH3)
    }
    pub fn free() -> Self {
        Self::new(ModelKind::Free)
    }
    pub fn with_cutoff(mut self, radius: f64) -> Self {
        self.cutoff = Some(radius);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let ModelKind::Power { p, sign, allow_subcritical } = self.kind {
            if !(p.is_finite() && sign.is_finite()) {
                return Err(WaveLabError::Config("power model needs finite p and sign".into()));
            }
            if !(sign == 1.0 || sign == -1.0) {
                return Err(WaveLabError::Config(format!("power sign must be ±1, got {sign}")));
            }
            if p <= 7.0 / 3.0 && !allow_subcritical {
                return Err(WaveLabError::Config(format!(
                    "power p = {p} is not supercritical (p > 7/3); set allow_subcritical to override"
                )));
            }
            if p < 1.0 {
                return Err(WaveLabError::Config(format!("power p = {p} < 1")));
            }
        }
        if let Some(r) = self.cutoff {
            if !(r.is_finite() && r > 0.0) {
                return Err(WaveLabError::Config(format!("cutoff radius {r} must be positive")));
            }
        }
        Ok(())
    }

    pub fn is_wave_map(&self) -> bool {
        matches!(self.kind, ModelKind::WmS3 | ModelKind::WmH3)
    }

    /// χ_R(r), or 1 without a cutoff.
    #[inline]
    pub fn cutoff_factor(&self, r: f64) -> f64 {
        match self.cutoff {
            None => 1.0,
            Some(radius) => smooth_cutoff(r, radius),
        }
    }

    /// F(r, u); overflow in the H³ model yields ±∞ so callers can detect blow-up.
    #[inline]
    pub fn force(&self, r: f64, u: f64) -> f64 {
        let f = match self.kind {
            ModelKind::CubicFocusing => u * u * u,
            ModelKind::CubicDefocusing => -u * u * u,
            ModelKind::Power { p, sign, .. } => sign * u.abs().powf(p - 1.0) * u,
            ModelKind::WmS3 => u * u * u * z_s3(r * u),
            ModelKind::WmH3 => {
                if (r * u).abs() > H3_OVERFLOW {
                    return -u.signum() * f64::INFINITY;
                }
                u * u * u * z_h3(r * u)
            }
            ModelKind::Free => 0.0,
        };
        f * self.cutoff_factor(r)
    }

    /// V(r, u) with F = −∂V/∂u.
    #[inline]
    pub fn potential(&self, r: f64, u: f64) -> f64 {
        let u2 = u * u;
        let v = match self.kind {
            ModelKind::CubicFocusing => -0.25 * u2 * u2,
            ModelKind::CubicDefocusing => 0.25 * u2 * u2,
            ModelKind::Power { p, sign, .. } => -sign * u.abs().powf(p + 1.0) / (p + 1.0),
            ModelKind::WmS3 => u2 * u2 * g_s3(r * u),
            ModelKind::WmH3 => {
                if (r * u).abs() > H3_OVERFLOW {
                    return f64::INFINITY;
                }
                u2 * u2 * g_h3(r * u)
            }
            ModelKind::Free => 0.0,
        };
        v * self.cutoff_factor(r)
    }

    /// |F(r,u)| / |u|³, the local cubic constant.
    pub fn cubic_constant(&self, r: f64, u: f64) -> f64 {
        if u == 0.0 {
            match self.kind {
                ModelKind::WmS3 | ModelKind::WmH3 => 4.0 / 3.0 * self.cutoff_factor(r),
                ModelKind::CubicFocusing | ModelKind::CubicDefocusing => self.cutoff_factor(r),
                _ => 0.0,
            }
        } else {
            (self.force(r, u) / (u * u * u)).abs()
        }
    }
}

/// Smooth step equal to 0 on r ≤ R/2 and 1 on r ≥ R.
pub fn smooth_cutoff(r: f64, radius: f64) -> f64 {
    let x = (r - 0.5 * radius) / (0.5 * radius);
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// F(r, u) with overflow reported as an error.
pub fn nonlinearity(model: &ModelSpec, r: f64, u: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite() && u.is_finite()) {
        return Err(WaveLabError::Domain(format!("nonlinearity at r = {r}, u = {u}")));
    }
    let f = model.force(r, u);
    if f.is_finite() {
        Ok(f)
    } else {
        Err(WaveLabError::Domain(format!("nonlinearity overflow at r·u = {:.3e} (blow-up signal)", r * u)))
    }
}

/// ∫ u_r² r⁴ dr through Plancherel.
pub(crate) fn gradient_energy(u: &RadialField) -> Result<f64> {
    let uh = forward_transform(u)?;
    let grid = u.grid();
    Ok(INV_TWO_PI_5
        * grid
            .freq_nodes()
            .iter()
            .zip(grid.freq_weights())
            .zip(uh.values())
            .map(|((p, w), v)| w * p * p * v * v)
            .sum::<f64>())
}

/// E = ∫ [½(u_t² + u_r²) + V(r, u)] r⁴ dr.
pub fn energy_u_form(model: &ModelSpec, state: &State) -> Result<f64> {
    let grad = gradient_energy(&state.u)?;
    let grid = state.grid();
    let mut rest = 0.0;
    for (((&r, &w), &u), &ut) in grid.nodes().iter().zip(grid.weights()).zip(state.u.values()).zip(state.ut.values()) {
        rest += w * (0.5 * ut * ut + model.potential(r, u));
    }
    let e = 0.5 * grad + rest;
    if e.is_finite() {
        Ok(e)
    } else {
        Err(WaveLabError::NonFinite("energy"))
    }
}

/// Wave-map energy ½∫[ψ_t² + ψ_r² + 2𝓖(ψ)/r²] r² dr with ψ = r u.
pub fn energy_psi_form(model: &ModelSpec, state: &State) -> Result<f64> {
    let big_g: fn(f64) -> f64 = match model.kind {
        ModelKind::WmS3 => |p: f64| p.sin().powi(2),
        ModelKind::WmH3 => |p: f64| p.sinh().powi(2),
        _ => return Err(WaveLabError::InvalidArgument("psi-form energy applies to wave-map models only".into())),
    };
    let ur = state.u.derivative_r()?;
    let grid = state.grid();
    let mut e = 0.0;
    for ((((&r, &w), &u), &ut), &dur) in
        grid.nodes().iter().zip(grid.weights()).zip(state.u.values()).zip(state.ut.values()).zip(ur.values())
    {
        let plain = w / r.powi(4);
        let psi = r * u;
        let psi_t = r * ut;
        let psi_r = u + r * dur;
        e += plain * (0.5 * (psi_t * psi_t + psi_r * psi_r) * r * r + big_g(psi));
    }
    if e.is_finite() {
        Ok(e)
    } else {
        Err(WaveLabError::NonFinite("energy"))
    }
}

/// Conserved energy of `state` under `model`.
///
/// Wave maps without a cutoff use the ψ variables; every other case uses the
/// u form. The two agree for wave maps up to quadrature error.
pub fn energy(model: &ModelSpec, state: &State) -> Result<f64> {
    if model.is_wave_map() && model.cutoff.is_none() {
        energy_psi_form(model, state)
    } else {
        energy_u_form(model, state)
    }
}

/// Pointwise residual u_tt − u_rr − (4/r)u_r − F(r, u) given a supplied u_tt.
pub fn residual(model: &ModelSpec, state: &State, utt: &RadialField) -> Result<RadialField> {
    state.u.same_grid(utt)?;
    let neg_lap = state.u.neg_laplacian()?;
    let grid = state.grid().clone();
    let values = grid
        .nodes()
        .iter()
        .zip(utt.values())
        .zip(neg_lap.values())
        .zip(state.u.values())
        .map(|(((&r, &a), &l), &u)| a + l - model.force(r, u))
        .collect();
    RadialField::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_spectral::RadialGrid;

    #[test]
    fn pointwise_values() {
        assert_eq!(nonlinearity(&ModelSpec::cubic_focusing(), 0.3, 2.0).unwrap(), 8.0);
        assert_eq!(nonlinearity(&ModelSpec::cubic_defocusing(), 0.3, 2.0).unwrap(), -8.0);
        let v = nonlinearity(&ModelSpec::wm_s3(), 1.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-14);
        let v = nonlinearity(&ModelSpec::wm_s3(), 1e-8, 1.0).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-12);
        let v = nonlinearity(&ModelSpec::wm_h3(), 1e-8, 1.0).unwrap();
        assert!((v + 4.0 / 3.0).abs() < 1e-12);
        assert!(nonlinearity(&ModelSpec::wm_h3(), 1.0, 400.0).is_err());
    }

    #[test]
    fn force_is_minus_potential_derivative() {
        let models = [
            ModelSpec::cubic_focusing(),
            ModelSpec::cubic_defocusing(),
            ModelSpec::power(5.0, 1.0).unwrap(),
            ModelSpec::wm_s3(),
            ModelSpec::wm_h3(),
            ModelSpec::wm_s3().with_cutoff(2.0),
        ];
        for m in models {
            for (r, u) in [(0.5, 0.7), (1.7, -0.4), (2.5, 1.3), (0.05, 0.2)] {
                let h = 1e-5;
                let fd = -(m.potential(r, u + h) - m.potential(r, u - h)) / (2.0 * h);
                let f = m.force(r, u);
                assert!((fd - f).abs() < 1e-8 * (1.0 + f.abs()), "{m:?} r={r} u={u}");
            }
        }
    }

    #[test]
    fn power_model_validation() {
        assert!(ModelSpec::power(2.0, 1.0).is_err());
        assert!(ModelSpec::power(3.0, 0.5).is_err());
        let m = ModelSpec::new(ModelKind::Power { p: 2.0, sign: 1.0, allow_subcritical: true });
        assert!(m.validate().is_ok());
    }

    #[test]
    fn cutoff_profile() {
        assert_eq!(smooth_cutoff(0.4, 1.0), 0.0);
        assert_eq!(smooth_cutoff(1.0, 1.0), 1.0);
        let x: Vec<f64> = (0..100).map(|i| 0.5 + 0.005 * i as f64).collect();
        assert!(x.windows(2).all(|p| smooth_cutoff(p[0], 1.0) <= smooth_cutoff(p[1], 1.0)));
    }

    #[test]
    fn energy_examples() {
        let g = RadialGrid::new(256, 16.0).unwrap();
        let zero = State::zeros(g.clone());
        assert_eq!(energy(&ModelSpec::cubic_focusing(), &zero).unwrap(), 0.0);
        let s =
            State::new(0.0, RadialField::zeros(g.clone()), RadialField::from_fn(g, |r| (-0.5 * r * r).exp())).unwrap();
        let e = energy(&ModelSpec::cubic_focusing(), &s).unwrap();
        let exact = 3.0 * std::f64::consts::PI.sqrt() / 16.0;
        assert!((e - exact).abs() < 1e-13);
    }

    #[test]
    fn wave_map_energy_forms_agree() {
        let g = RadialGrid::new(512, 20.0).unwrap();
        let s = State::new(
            0.0,
            RadialField::from_fn(g.clone(), |r| 0.8 * (-r * r / 2.0).exp()),
            RadialField::from_fn(g, |r| 0.3 * r * r * (-r * r / 2.0).exp()),
        )
        .unwrap();
        for m in [ModelSpec::wm_s3(), ModelSpec::wm_h3()] {
            let a = energy_psi_form(&m, &s).unwrap();
            let b = energy_u_form(&m, &s).unwrap();
            assert!((a - b).abs() < 1e-10 * a.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn model_json_round_trip() {
        let m = ModelSpec::power(5.0, -1.0).unwrap().with_cutoff(3.0);
        let text = serde_json::to_string(&m).unwrap();
        let back: ModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
        let m: ModelSpec = serde_json::from_str(r#"{"kind":"wm_s3"}"#).unwrap();
        assert_eq!(m, ModelSpec::wm_s3());
    }
}
