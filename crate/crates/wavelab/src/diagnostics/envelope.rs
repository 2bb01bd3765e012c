use serde::Serialize;

use crate::error::{Result, WaveLabError};
use crate::models::State;
use crate::radial_spectral::{
    forward_transform, lebesgue_norm, lp_multiplier, project_band, RadialField, RadialGrid, INV_TWO_PI_5, OMEGA4,
};

/// Default envelope decay exponent σ.
pub const DEFAULT_SIGMA: f64 = 1.25;

/// Dyadic band masses a_k and their envelope α_k = Σ_j 2^{−σ|j−k|} a_j.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeSeq {
    pub k_range: (i32, i32),
    pub a: Vec<f64>,
    pub alpha: Vec<f64>,
    pub sigma: f64,
}

impl EnvelopeSeq {
    pub fn ks(&self) -> impl Iterator<Item = i32> {
        self.k_range.0..=self.k_range.1
    }

    pub fn a_l2(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn alpha_l2(&self) -> f64 {
        self.alpha.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// ‖{2^k α_k}‖_{ℓ²}.
    pub fn weighted_sum(&self) -> f64 {
        self.ks().zip(&self.alpha).map(|(k, a)| (2f64.powi(k) * a).powi(2)).sum::<f64>().sqrt()
    }

    /// Extreme ratios α_{k+1}/α_k over consecutive nonzero entries.
    pub fn variation_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for p in self.alpha.windows(2) {
            if p[0] > 0.0 && p[1] > 0.0 {
                let q = p[1] / p[0];
                lo = lo.min(q);
                hi = hi.max(q);
            }
        }
        (lo, hi)
    }
}

/// Σ_j 2^{−σ|j|} = (1 + q)/(1 − q) with q = 2^{−σ}.
pub fn schur_constant(sigma: f64) -> f64 {
    let q = 2f64.powf(-sigma);
    (1.0 + q) / (1.0 - q)
}

/// Dyadic indices whose centre frequency the grid resolves.
fn band_range(grid: &RadialGrid) -> (i32, i32) {
    (grid.rho_min().log2().ceil() as i32, grid.rho_max().log2().floor() as i32)
}

/// Band masses and envelope of a state.
pub fn frequency_envelope(state: &State, sigma: f64) -> Result<EnvelopeSeq> {
    if !(sigma > 0.0) {
        return Err(WaveLabError::InvalidArgument("envelope exponent sigma must be positive".into()));
    }
    let (k0, k1) = band_range(state.grid());
    let uh = forward_transform(&state.u)?;
    let uth = forward_transform(&state.ut)?;
    let a: Vec<f64> = (k0..=k1)
        .map(|k| {
            let m = |p: f64| lp_multiplier(k, p).powi(2);
            let c = 2f64.powi(k);
            c.powf(1.5) * uh.weighted_mass(m).sqrt() + c.sqrt() * uth.weighted_mass(m).sqrt()
        })
        .collect();
    let alpha = (0..a.len())
        .map(|i| a.iter().enumerate().map(|(j, aj)| 2f64.powf(-sigma * (i as f64 - j as f64).abs()) * aj).sum())
        .collect();
    Ok(EnvelopeSeq { k_range: (k0, k1), a, alpha, sigma })
}

/// C∞^{4/5} where ‖P_k f‖_{L∞} ≤ C∞ 2^{5k/2}‖P_k f‖_{L²}; bounds the L¹⁰ ratio by interpolation.
pub fn bernstein_sup_constant() -> f64 {
    let c_inf = (INV_TWO_PI_5 * OMEGA4 * (32.0 - 1.0 / 32.0) / 5.0).sqrt();
    c_inf.powf(0.8)
}

/// ‖P_k f‖_{L¹⁰} / (2^{2k}‖P_k f‖_{L²}).
pub fn bernstein_lebesgue_ratio(f: &RadialField, k: i32) -> Result<f64> {
    let pk = project_band(f, k)?;
    let l2 = lebesgue_norm(&pk, 2.0)?;
    if l2 == 0.0 {
        return Err(WaveLabError::IllPosed(format!("band {k} of the field is empty")));
    }
    Ok(lebesgue_norm(&pk, 10.0)? / (4f64.powi(k) * l2))
}

/// ‖|∇|^s P_k f‖_{L²} / (2^{sk}‖P_k f‖_{L²}).
pub fn bernstein_derivative_ratio(f: &RadialField, k: i32, s: f64) -> Result<f64> {
    let spec = forward_transform(f)?;
    let base = spec.weighted_mass(|p| lp_multiplier(k, p).powi(2));
    if base == 0.0 {
        return Err(WaveLabError::IllPosed(format!("band {k} of the field is empty")));
    }
    let top = spec.weighted_mass(|p| lp_multiplier(k, p).powi(2) * p.powf(2.0 * s));
    Ok((top / base).sqrt() / 2f64.powf(s * k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_spectral::{inverse_transform, SpectralField};

    fn band_pure_state(k: i32) -> State {
        let g = RadialGrid::new(512, 80.0).unwrap();
        let spec = SpectralField::from_fn(g.clone(), |p| lp_multiplier(k, p));
        let u = inverse_transform(&spec).unwrap();
        State { t: 0.0, u, ut: RadialField::zeros(g) }
    }

    #[test]
    fn single_band_envelope() {
        let s = band_pure_state(0);
        let env = frequency_envelope(&s, DEFAULT_SIGMA).unwrap();
        let i0 = (0 - env.k_range.0) as usize;
        let a0 = env.a[i0];
        for (i, k) in env.ks().enumerate() {
            if k.abs() >= 2 {
                // The bump is only Gevrey-smooth, so its spatial profile decays like
                // e^{−c√r} and truncation at r_max leaks about 1e-4 into other bands.
                assert!(env.a[i] < 1e-3 * a0, "k={k} a={}", env.a[i]);
            }
            assert!(env.alpha[i] >= env.a[i]);
        }
        let (lo, hi) = env.variation_range();
        let q = 2f64.powf(DEFAULT_SIGMA);
        assert!(lo >= 1.0 / q - 1e-12 && hi <= q + 1e-12);
        assert!(env.alpha_l2() <= schur_constant(DEFAULT_SIGMA) * env.a_l2());
    }

    #[test]
    fn schur_constant_matches_sum() {
        let direct: f64 = (-200..=200).map(|j: i32| 2f64.powf(-1.25 * j.abs() as f64)).sum();
        assert!((direct - schur_constant(1.25)).abs() < 1e-12);
    }

    #[test]
    fn bernstein_ratios_bounded() {
        let g = RadialGrid::new(1024, 64.0).unwrap();
        let f = RadialField::from_fn(g, |r| (-0.02 * r * r).exp() * (1.0 + (3.0 * r).cos()));
        let cap = bernstein_sup_constant();
        for k in -1..=3 {
            let q = bernstein_lebesgue_ratio(&f, k).unwrap();
            assert!(q > 0.0 && q <= cap, "k={k} q={q} cap={cap}");
            let d = bernstein_derivative_ratio(&f, k, 1.5).unwrap();
            assert!((0.125..=8.0).contains(&d));
        }
    }
}
