use std::sync::Arc;

use super::{kernel, kernel_derivative, RadialGrid, INV_TWO_PI_5, OMEGA4};
use crate::error::{ensure_finite, Result, WaveLabError};
use crate::quad;

/// Samples of a radial function on the nodes of a [`RadialGrid`].
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

/// Radial Fourier coefficients f̂(ρ_j) on the frequency nodes of a grid.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

fn check_len(grid: &RadialGrid, len: usize) -> Result<()> {
    if len != grid.n() {
        return Err(WaveLabError::InvalidArgument(format!("expected {} samples, got {len}", grid.n())));
    }
    Ok(())
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        ensure_finite(&values, "radial field")?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.n();
        Self { grid, values: vec![0.0; n] }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { grid, values }
    }

    pub(crate) fn from_raw(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.n(), values.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &RadialField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(WaveLabError::GridMismatch)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Pointwise a·self + b·other.
    pub fn axpby(&self, a: f64, other: &RadialField, b: f64) -> Result<RadialField> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn scaled(&self, a: f64) -> RadialField {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| a * v).collect() }
    }

    pub fn map<F: Fn(f64, f64) -> f64>(&self, f: F) -> RadialField {
        let values = self.grid.nodes().iter().zip(&self.values).map(|(&r, &v)| f(r, v)).collect();
        Self { grid: self.grid.clone(), values }
    }

    /// ∫₀^{r_max} g(r, f(r)) r⁴ dr by the grid quadrature.
    pub fn integrate_r4<F: Fn(f64, f64) -> f64>(&self, g: F) -> f64 {
        self.grid.nodes().iter().zip(self.grid.weights()).zip(&self.values).map(|((&r, &w), &v)| w * g(r, v)).sum()
    }

    /// Value at r = 0 by even extrapolation through the three innermost nodes.
    pub fn value_at_origin(&self) -> f64 {
        let r = self.grid.nodes();
        let x = [r[0] * r[0], r[1] * r[1], r[2] * r[2]];
        let y = [self.values[0], self.values[1], self.values[2]];
        let mut acc = 0.0;
        for j in 0..3 {
            let mut l = 1.0;
            for k in 0..3 {
                if k != j {
                    l *= (0.0 - x[k]) / (x[j] - x[k]);
                }
            }
            acc += l * y[j];
        }
        acc
    }

    /// Spectral evaluation at arbitrary radii (exact for resolved fields).
    pub fn eval_at(&self, points: &[f64]) -> Vec<f64> {
        forward_transform(self).map(|s| s.eval_at(points)).unwrap_or_default()
    }

    /// Spectral evaluation of ∂_r f at arbitrary radii.
    pub fn eval_dr_at(&self, points: &[f64]) -> Vec<f64> {
        forward_transform(self).map(|s| s.eval_dr_at(points)).unwrap_or_default()
    }

    /// ∂_r f on the grid nodes by spectral differentiation.
    pub fn derivative_r(&self) -> Result<RadialField> {
        let spec = forward_transform(self)?;
        let n = self.grid.n();
        let values = quad::matvec(self.grid.inverse_dr_matrix(), n, &spec.values);
        Ok(Self { grid: self.grid.clone(), values })
    }

    /// −Δf = −(f'' + 4f'/r), through the multiplier ρ².
    pub fn neg_laplacian(&self) -> Result<RadialField> {
        fractional_derivative(self, 2.0)
    }

    /// Largest |f| over the outermost 5% of nodes relative to max |f|.
    pub fn edge_fraction(&self) -> f64 {
        let n = self.values.len();
        let start = n - (n / 20).max(1);
        let edge = self.values[start..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let peak = self.max_abs();
        if peak == 0.0 {
            0.0
        } else {
            edge / peak
        }
    }
}

impl SpectralField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        ensure_finite(&values, "spectral field")?;
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F) -> Self {
        let values = grid.freq_nodes().iter().map(|&p| f(p)).collect();
        Self { grid, values }
    }

    pub(crate) fn from_raw(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Multiplies by m(ρ).
    pub fn multiply<F: Fn(f64) -> f64>(&self, m: F) -> SpectralField {
        let values = self.grid.freq_nodes().iter().zip(&self.values).map(|(&p, &v)| m(p) * v).collect();
        Self { grid: self.grid.clone(), values }
    }

    /// (2π)⁻⁵ ω₄ ∫ m(ρ) |f̂|² ρ⁴ dρ.
    pub fn weighted_mass<F: Fn(f64) -> f64>(&self, m: F) -> f64 {
        INV_TWO_PI_5
            * OMEGA4
            * self
                .grid
                .freq_nodes()
                .iter()
                .zip(self.grid.freq_weights())
                .zip(&self.values)
                .map(|((&p, &w), &v)| w * m(p) * v * v)
                .sum::<f64>()
    }

    /// Inverse transform evaluated at arbitrary radii.
    pub fn eval_at(&self, points: &[f64]) -> Vec<f64> {
        let fw: Vec<f64> = self.values.iter().zip(self.grid.freq_weights()).map(|(v, w)| v * w).collect();
        points
            .iter()
            .map(|&r| {
                INV_TWO_PI_5 * self.grid.freq_nodes().iter().zip(&fw).map(|(&p, &c)| kernel(r * p) * c).sum::<f64>()
            })
            .collect()
    }

    /// Radial derivative of the inverse transform at arbitrary radii.
    pub fn eval_dr_at(&self, points: &[f64]) -> Vec<f64> {
        let fw: Vec<f64> = self.values.iter().zip(self.grid.freq_weights()).map(|(v, w)| v * w).collect();
        points
            .iter()
            .map(|&r| {
                INV_TWO_PI_5
                    * self
                        .grid
                        .freq_nodes()
                        .iter()
                        .zip(&fw)
                        .map(|(&p, &c)| p * kernel_derivative(r * p) * c)
                        .sum::<f64>()
            })
            .collect()
    }
}

/// f̂ = A f by the grid quadrature.
pub fn forward_transform(f: &RadialField) -> Result<SpectralField> {
    ensure_finite(&f.values, "forward transform input")?;
    let n = f.grid.n();
    let values = quad::matvec(f.grid.forward_matrix(), n, &f.values);
    Ok(SpectralField { grid: f.grid.clone(), values })
}

/// f = B f̂.
pub fn inverse_transform(f: &SpectralField) -> Result<RadialField> {
    ensure_finite(&f.values, "inverse transform input")?;
    let n = f.grid.n();
    let values = quad::matvec(f.grid.inverse_matrix(), n, &f.values);
    Ok(RadialField { grid: f.grid.clone(), values })
}

/// Relative amplitude below which low-frequency content counts as absent.
const LOW_FREQUENCY_TOL: f64 = 1e-8;

/// |∇|^s f, the inverse transform of ρ^s f̂.
pub fn fractional_derivative(f: &RadialField, s: f64) -> Result<RadialField> {
    if !(-2.0..=4.0).contains(&s) {
        return Err(WaveLabError::InvalidArgument(format!("fractional order s = {s} outside [-2, 4]")));
    }
    let spec = forward_transform(f)?;
    if s == 0.0 {
        return inverse_transform(&spec);
    }
    if s < 0.0 {
        let peak = spec.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let rho_low = 1e-3 * f.grid.rho_max();
        let low = spec
            .grid
            .freq_nodes()
            .iter()
            .zip(&spec.values)
            .filter(|(p, _)| **p < rho_low)
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        if peak > 0.0 && low > LOW_FREQUENCY_TOL * peak {
            return Err(WaveLabError::IllPosed(format!(
                "negative order s = {s} applied to a field with low-frequency content \
                 (relative amplitude {:.2e} below rho = {rho_low:.3e})",
                low / peak
            )));
        }
    }
    inverse_transform(&spec.multiply(|p| p.powf(s)))
}

/// Tail fraction threshold for declaring a Sobolev integrand unresolved.
const SOBOLEV_TAIL_TOL: f64 = 1e-6;

/// ‖f‖_{Ḣ^s} = ((2π)⁻⁵ ω₄ ∫ ρ^{2s+4} |f̂|² dρ)^{1/2}.
pub fn sobolev_norm(f: &RadialField, s: f64) -> Result<f64> {
    let spec = forward_transform(f)?;
    spectral_sobolev_norm(&spec, s)
}

pub(crate) fn spectral_sobolev_norm(spec: &SpectralField, s: f64) -> Result<f64> {
    let total = spec.weighted_mass(|p| p.powf(2.0 * s));
    if total == 0.0 {
        return Ok(0.0);
    }
    let cut = 0.9 * spec.grid.rho_max();
    let tail = spec.weighted_mass(|p| if p > cut { p.powf(2.0 * s) } else { 0.0 });
    let fraction = tail / total;
    if fraction > SOBOLEV_TAIL_TOL {
        return Err(WaveLabError::Unresolved { what: "sobolev norm", fraction });
    }
    Ok(total.sqrt())
}

/// (‖f‖²_{L²} + ‖f‖²_{Ḣ^s})^{1/2}.
pub fn inhomogeneous_norm(f: &RadialField, s: f64) -> Result<f64> {
    let spec = forward_transform(f)?;
    let l2 = spectral_sobolev_norm(&spec, 0.0)?;
    let hs = spectral_sobolev_norm(&spec, s)?;
    Ok((l2 * l2 + hs * hs).sqrt())
}

/// (ω₄ ∫ |f|^p r⁴ dr)^{1/p}; p = ∞ gives max |f|.
pub fn lebesgue_norm(f: &RadialField, p: f64) -> Result<f64> {
    ensure_finite(&f.values, "lebesgue norm input")?;
    if p.is_infinite() && p > 0.0 {
        return Ok(f.max_abs());
    }
    if !(p >= 1.0) {
        return Err(WaveLabError::InvalidArgument(format!("Lebesgue exponent p = {p} < 1")));
    }
    let integral = OMEGA4 * f.integrate_r4(|_, v| v.abs().powf(p));
    Ok(integral.powf(1.0 / p))
}
