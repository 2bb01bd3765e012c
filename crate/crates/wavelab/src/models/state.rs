use std::sync::Arc;

use crate::error::{Result, WaveLabError};
use crate::radial_spectral::{RadialField, RadialGrid};

/// The pair (u, u_t) at time t, both on one grid.
#[derive(Debug, Clone)]
pub struct State {
    pub t: f64,
    pub u: RadialField,
    pub ut: RadialField,
}

impl State {
    pub fn new(t: f64, u: RadialField, ut: RadialField) -> Result<Self> {
        u.same_grid(&ut)?;
        if !t.is_finite() {
            return Err(WaveLabError::InvalidArgument("state time must be finite".into()));
        }
        Ok(Self { t, u, ut })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        Self { t: 0.0, u: RadialField::zeros(grid.clone()), ut: RadialField::zeros(grid) }
    }

    pub fn from_fns<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(grid: Arc<RadialGrid>, t: f64, u: F, ut: G) -> Self {
        Self { t, u: RadialField::from_fn(grid.clone(), u), ut: RadialField::from_fn(grid, ut) }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.u.grid()
    }

    /// ψ = r u, the wave-map angle.
    pub fn psi(&self) -> RadialField {
        self.u.map(|r, v| r * v)
    }

    /// ψ_t = r u_t.
    pub fn psi_t(&self) -> RadialField {
        self.ut.map(|r, v| r * v)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.ut.is_finite()
    }

    pub fn linf(&self) -> f64 {
        self.u.max_abs()
    }

    /// u_λ(t, r) = λ⁻¹ u(t/λ, r/λ) applied to the data, evaluated spectrally.
    pub fn rescaled(&self, lambda: f64) -> Result<State> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(WaveLabError::InvalidArgument("rescaling needs lambda > 0".into()));
        }
        let pts: Vec<f64> = self.grid().nodes().iter().map(|r| r / lambda).collect();
        let u: Vec<f64> = self.u.eval_at(&pts).into_iter().map(|v| v / lambda).collect();
        let ut: Vec<f64> = self.ut.eval_at(&pts).into_iter().map(|v| v / (lambda * lambda)).collect();
        State::new(
            self.t * lambda,
            RadialField::new(self.grid().clone(), u)?,
            RadialField::new(self.grid().clone(), ut)?,
        )
    }
}
