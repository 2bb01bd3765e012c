//! Exterior energy channels for free radial waves: exterior norms, the plane
//! P(R) = span{(r⁻³, 0), (0, r⁻³)}, the projections π_R and π_R^⊥, and
//! asymptotic exterior energies.
//!
//! Exterior data live on a composite Gauss–Legendre rule over [R, r_out] and
//! continue beyond r_out as a Newtonian tail (a r⁻³, b r⁻³), so plane elements
//! are represented exactly.

mod ensemble;

use serde::Serialize;

pub use ensemble::{ensemble_member, run_ensemble, EnsembleConfig, EnsembleSummary};

use crate::error::{Result, WaveLabError};
use crate::models::State;
use crate::quad::{
    barycentric_eval, barycentric_weights, gauss_legendre, gauss_legendre_on, lagrange_local,
    lagrange_local_with_derivative, CompositeRule,
};
use crate::radial_spectral::{free_propagate, RadialField};

/// Stencil size for sampling grid fields.
const LOCAL_ORDER: usize = 12;

/// Panel layout of an exterior rule; panels are graded geometrically in r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelSpec {
    pub panels: usize,
    pub order: usize,
}

impl Default for PanelSpec {
    fn default() -> Self {
        Self { panels: 64, order: 16 }
    }
}

/// A data pair (f, g) restricted to r ≥ R.
#[derive(Debug, Clone)]
pub struct ExteriorPair {
    pub r_in: f64,
    pub r_out: f64,
    rule: CompositeRule,
    bary: Vec<f64>,
    f: Vec<f64>,
    fr: Vec<f64>,
    g: Vec<f64>,
    /// ∫_r^∞ g ρ dρ at the nodes, tail included.
    ig: Vec<f64>,
    f_at_r_in: f64,
    ig_at_r_in: f64,
    /// Newtonian continuation f = a r⁻³, g = b r⁻³ beyond r_out.
    pub tail: (f64, f64),
}

impl ExteriorPair {
    /// Builds a pair from f, f_r and g given as functions on [R, r_out].
    pub fn from_fns<F, Fr, G>(
        r_in: f64,
        r_out: f64,
        spec: PanelSpec,
        f: F,
        fr: Fr,
        g: G,
        tail: (f64, f64),
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64,
        Fr: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
    {
        if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) {
            return Err(WaveLabError::InvalidArgument(format!("exterior interval [{r_in}, {r_out}] is empty")));
        }
        let rule = CompositeRule::graded(r_in, r_out, spec.panels, spec.order);
        let fv: Vec<f64> = rule.nodes.iter().map(|&r| f(r)).collect();
        let frv: Vec<f64> = rule.nodes.iter().map(|&r| fr(r)).collect();
        let gv: Vec<f64> = rule.nodes.iter().map(|&r| g(r)).collect();
        Self::assemble(rule, fv, frv, gv, f(r_in), tail)
    }

    /// Samples grid fields on [R, r_out] by local interpolation of the node values;
    /// the tail continues the values at r_out.
    ///
    /// Local interpolation is used instead of spectral evaluation because exterior
    /// data such as r⁻³ profiles are cut at r_max, and the resulting ringing of the
    /// spectral interpolant spoils the r⁴-weighted norms at the 1e-3 level.
    pub fn from_fields(f: &RadialField, g: &RadialField, r_in: f64, r_out: f64, spec: PanelSpec) -> Result<Self> {
        f.same_grid(g)?;
        if r_out > f.grid().r_max() * (1.0 + 1e-12) {
            return Err(WaveLabError::OutOfRange(format!(
                "exterior interval reaches {r_out} beyond r_max = {}",
                f.grid().r_max()
            )));
        }
        if !(r_in > 0.0 && r_out > r_in) {
            return Err(WaveLabError::InvalidArgument(format!("exterior interval [{r_in}, {r_out}] is empty")));
        }
        let rule = CompositeRule::graded(r_in, r_out, spec.panels, spec.order);
        let nodes = f.grid().nodes();
        let sample = |r: f64| lagrange_local_with_derivative(nodes, f.values(), r, LOCAL_ORDER);
        let (fv, frv): (Vec<f64>, Vec<f64>) = rule.nodes.iter().map(|&r| sample(r)).unzip();
        let gv: Vec<f64> = rule.nodes.iter().map(|&r| lagrange_local(nodes, g.values(), r, LOCAL_ORDER)).collect();
        let c = r_out.powi(3);
        let tail = (c * sample(r_out).0, c * lagrange_local(nodes, g.values(), r_out, LOCAL_ORDER));
        Self::assemble(rule, fv, frv, gv, sample(r_in).0, tail)
    }

    /// The exterior part of a state beyond `r_in`, up to the grid edge.
    pub fn from_state(state: &State, r_in: f64, spec: PanelSpec) -> Result<Self> {
        Self::from_fields(&state.u, &state.ut, r_in, state.grid().r_max(), spec)
    }

    /// The plane element (A r⁻³, B r⁻³) on r ≥ R.
    pub fn plane(r_in: f64, r_out: f64, spec: PanelSpec, a: f64, b: f64) -> Result<Self> {
        Self::from_fns(r_in, r_out, spec, |r| a / r.powi(3), |r| -3.0 * a / r.powi(4), |r| b / r.powi(3), (a, b))
    }

    fn assemble(
        rule: CompositeRule,
        f: Vec<f64>,
        fr: Vec<f64>,
        g: Vec<f64>,
        f_at_r_in: f64,
        tail: (f64, f64),
    ) -> Result<Self> {
        let m = rule.m;
        let (x, _) = gauss_legendre(m);
        let bary = barycentric_weights(&x);
        // Partial integrals of gρ from each node to its panel end, then suffix sums over panels.
        let mut panel_total = vec![0.0; rule.panels];
        let mut partial = vec![0.0; rule.nodes.len()];
        let (sx, sw) = gauss_legendre_on(m, 0.0, 1.0);
        for p in 0..rule.panels {
            let (lo, hi) = rule.panel(p);
            let h = hi - lo;
            let vals: Vec<f64> = (0..m).map(|j| g[p * m + j] * rule.nodes[p * m + j]).collect();
            let interp = |r: f64| barycentric_eval(&x, &bary, &vals, 2.0 * (r - lo) / h - 1.0);
            panel_total[p] = (0..m).map(|j| rule.weights[p * m + j] * vals[j]).sum();
            for j in 0..m {
                let a = rule.nodes[p * m + j];
                let len = hi - a;
                partial[p * m + j] = sx.iter().zip(&sw).map(|(s, w)| w * len * interp(a + s * len)).sum();
            }
        }
        let tail_ig = tail.1 / rule.b;
        let mut suffix = vec![0.0; rule.panels + 1];
        suffix[rule.panels] = tail_ig;
        for p in (0..rule.panels).rev() {
            suffix[p] = suffix[p + 1] + panel_total[p];
        }
        let ig: Vec<f64> = (0..rule.nodes.len()).map(|i| partial[i] + suffix[i / m + 1]).collect();
        let ig_at_r_in = suffix[0];
        let out = Self { r_in: rule.a, r_out: rule.b, bary, f, fr, g, ig, f_at_r_in, ig_at_r_in, tail, rule };
        if !(out.f.iter().chain(&out.fr).chain(&out.g).all(|v| v.is_finite()) && f_at_r_in.is_finite()) {
            return Err(WaveLabError::NonFinite("exterior pair samples"));
        }
        Ok(out)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    /// f at an arbitrary radius in [R, r_out] by per-panel interpolation.
    pub fn f_at(&self, r: f64) -> f64 {
        if r >= self.r_out {
            return self.tail.0 / r.powi(3);
        }
        let p = self.rule.locate(r);
        let m = self.rule.m;
        let (x, _) = gauss_legendre(m);
        let (lo, hi) = self.rule.panel(p);
        let h = hi - lo;
        barycentric_eval(&x, &self.bary, &self.f[p * m..(p + 1) * m], 2.0 * (r - lo) / h - 1.0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.rule.nodes.len() != other.rule.nodes.len()
            || (self.r_in - other.r_in).abs() > 0.0
            || (self.r_out - other.r_out).abs() > 0.0
        {
            return Err(WaveLabError::GridMismatch);
        }
        Ok(())
    }

    /// ⟨(f₁, g₁), (f₂, g₂)⟩ = ∫_R^∞ (f₁' f₂' + g₁ g₂) r⁴ dr.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        let body: f64 = (0..self.rule.nodes.len())
            .map(|i| {
                let r = self.rule.nodes[i];
                self.rule.weights[i] * (self.fr[i] * other.fr[i] + self.g[i] * other.g[i]) * r.powi(4)
            })
            .sum();
        let (a1, b1) = self.tail;
        let (a2, b2) = other.tail;
        Ok(body + 3.0 * a1 * a2 / self.r_out.powi(3) + b1 * b2 / self.r_out)
    }

    /// ‖(f, g)‖² in Ḣ¹ × L²(r ≥ R).
    pub fn norm2(&self) -> f64 {
        self.inner(self).expect("a pair is compatible with itself")
    }

    /// Coefficients (A, B) of π_R(f, g) = (A r⁻³, B r⁻³):
    /// A = R³ f(R), B = R ∫_R^∞ g ρ dρ.
    pub fn plane_coefficients(&self) -> (f64, f64) {
        (self.r_in.powi(3) * self.f_at_r_in, self.r_in * self.ig_at_r_in)
    }

    /// Subtracts the plane element (A r⁻³, B r⁻³).
    pub fn minus_plane(&self, a: f64, b: f64) -> Self {
        let mut out = self.clone();
        for (i, &r) in self.rule.nodes.iter().enumerate() {
            out.f[i] -= a / r.powi(3);
            out.fr[i] += 3.0 * a / r.powi(4);
            out.g[i] -= b / r.powi(3);
            out.ig[i] -= b / r;
        }
        out.f_at_r_in -= a / self.r_in.powi(3);
        out.ig_at_r_in -= b / self.r_in;
        out.tail = (self.tail.0 - a, self.tail.1 - b);
        out
    }

    /// Pair with the same layout holding the plane element (A r⁻³, B r⁻³).
    pub fn plane_like(&self, a: f64, b: f64) -> Self {
        self.scaled(0.0).minus_plane(-a, -b)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in out.f.iter_mut().chain(out.fr.iter_mut()).chain(out.g.iter_mut()).chain(out.ig.iter_mut()) {
            *v *= c;
        }
        out.f_at_r_in *= c;
        out.ig_at_r_in *= c;
        out.tail = (c * self.tail.0, c * self.tail.1);
        out
    }

    /// Asymptotic exterior energies (E₊, E₋) for t → +∞ and t → −∞:
    /// E± = ½∫_R^∞ (v₀'/r ± v₁')² dr with v₀ = r³f and v₁ = r∫_r^∞ g ρ dρ.
    /// Plane elements have v₀' = v₁' = 0, so the tail contributes nothing.
    pub fn radiation_energies(&self) -> (f64, f64) {
        let mut plus = 0.0;
        let mut minus = 0.0;
        for (i, &r) in self.rule.nodes.iter().enumerate() {
            let a = 3.0 * r * self.f[i] + r * r * self.fr[i];
            let b = self.ig[i] - r * r * self.g[i];
            plus += self.rule.weights[i] * (a + b) * (a + b);
            minus += self.rule.weights[i] * (a - b) * (a - b);
        }
        (0.5 * plus, 0.5 * minus)
    }
}

/// π_R and π_R^⊥ of a pair of grid fields restricted to r ≥ R.
pub fn project_plane(f: &RadialField, g: &RadialField, r_in: f64) -> Result<(ExteriorPair, ExteriorPair)> {
    let pair = ExteriorPair::from_fields(f, g, r_in, f.grid().r_max(), PanelSpec::default())?;
    Ok(project_pair(&pair))
}

/// π_R and π_R^⊥ of an exterior pair.
pub fn project_pair(pair: &ExteriorPair) -> (ExteriorPair, ExteriorPair) {
    let (a, b) = pair.plane_coefficients();
    (pair.plane_like(a, b), pair.minus_plane(a, b))
}

/// ∫_{R+|t|}^∞ (u_t² + u_r²) r⁴ dr of a state, with Newtonian continuation past r_max.
pub fn exterior_norm2(state: &State, r_in: f64, t_shift: f64) -> Result<f64> {
    let rho = r_in + t_shift.abs();
    if rho >= state.grid().r_max() {
        return Err(WaveLabError::OutOfRange(format!(
            "exterior region r > {rho} exceeds r_max = {}",
            state.grid().r_max()
        )));
    }
    Ok(ExteriorPair::from_state(state, rho, PanelSpec::default())?.norm2())
}

/// Norms and asymptotic exterior energies of one datum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelReport {
    #[serde(rename = "R")]
    pub r: f64,
    pub proj_norm2: f64,
    pub perp_norm2: f64,
    pub ext_plus: f64,
    pub ext_minus: f64,
    /// max(E₊, E₋)/‖π^⊥‖²; None when the orthogonal part vanishes.
    pub c0_lower: Option<f64>,
    /// |‖π‖² + ‖π^⊥‖² − ‖data‖²| relative to ‖data‖².
    pub orthogonality_defect: f64,
}

/// Perpendicular part below this fraction of the total counts as zero.
const PERP_FLOOR: f64 = 1e-12;

/// Channel report from the exact radiation formula.
pub fn channel_report(pair: &ExteriorPair) -> ChannelReport {
    let total = pair.norm2();
    let (pi, perp) = project_pair(pair);
    let proj_norm2 = pi.norm2();
    let perp_norm2 = perp.norm2();
    let (ext_plus, ext_minus) = pair.radiation_energies();
    let c0_lower = (perp_norm2 > PERP_FLOOR * total.max(f64::MIN_POSITIVE) && perp_norm2 > 0.0)
        .then(|| ext_plus.max(ext_minus) / perp_norm2);
    let orthogonality_defect = if total > 0.0 { (proj_norm2 + perp_norm2 - total).abs() / total } else { 0.0 };
    ChannelReport { r: pair.r_in, proj_norm2, perp_norm2, ext_plus, ext_minus, c0_lower, orthogonality_defect }
}

/// Exterior energies probed along the free flow and their Richardson limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub times: Vec<f64>,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub limit_plus: f64,
    pub limit_minus: f64,
}

/// Richardson extrapolation in 1/t from values at t, 2t, 4t (first and second order terms removed).
pub fn richardson3(e1: f64, e2: f64, e4: f64) -> f64 {
    let a = 2.0 * e2 - e1;
    let b = 2.0 * e4 - e2;
    (4.0 * b - a) / 3.0
}

/// Free-propagates compact data to ±T, ±2T, ±4T and extrapolates the exterior energies.
pub fn probe_exterior(state: &State, r_in: f64, t_probe: f64, support: f64) -> Result<ProbeReport> {
    let r_max = state.grid().r_max();
    if r_in + 4.0 * t_probe + support > r_max {
        return Err(WaveLabError::OutOfRange(format!(
            "need r_max >= R + 4T + support = {}, have {r_max}",
            r_in + 4.0 * t_probe + support
        )));
    }
    let times = vec![t_probe, 2.0 * t_probe, 4.0 * t_probe];
    let mut plus = Vec::with_capacity(3);
    let mut minus = Vec::with_capacity(3);
    for &t in &times {
        plus.push(exterior_norm2(&free_propagate(state, t)?, r_in, t)?);
        minus.push(exterior_norm2(&free_propagate(state, -t)?, r_in, t)?);
    }
    Ok(ProbeReport {
        limit_plus: richardson3(plus[0], plus[1], plus[2]),
        limit_minus: richardson3(minus[0], minus[1], minus[2]),
        times,
        plus,
        minus,
    })
}

/// Channel report whose exterior energies come from the probe route.
pub fn channel_experiment(state: &State, r_in: f64, t_probe: f64, support: f64) -> Result<ChannelReport> {
    let probes = probe_exterior(state, r_in, t_probe, support)?;
    let pair = ExteriorPair::from_state(state, r_in, PanelSpec::default())?;
    let mut rep = channel_report(&pair);
    rep.ext_plus = probes.limit_plus;
    rep.ext_minus = probes.limit_minus;
    rep.c0_lower = rep.c0_lower.map(|_| rep.ext_plus.max(rep.ext_minus) / rep.perp_norm2);
    Ok(rep)
}
