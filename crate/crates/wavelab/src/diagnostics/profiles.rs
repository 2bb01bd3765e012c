use serde::Serialize;

use crate::error::{Result, WaveLabError};
use crate::models::State;
use crate::quad::{gauss_legendre_on, lagrange_local, least_squares, CompositeRule};
use crate::radial_spectral::RadialField;

/// v₀ = r³u and v₁ = r∫_r^∞ u_t ρ dρ with their fitted limits at infinity.
#[derive(Debug, Clone)]
pub struct V0V1Report {
    pub v0: RadialField,
    pub v1: RadialField,
    /// None when the fit residual exceeds tolerance (no limit detected).
    pub ell0: Option<f64>,
    pub ell1: Option<f64>,
    pub residual0: f64,
    pub residual1: f64,
}

/// Relative fit residual above which no limit is reported.
const FIT_TOL: f64 = 1e-3;

fn tail_integrals(state: &State) -> Vec<f64> {
    // ∫_{r_i}^{r_max} u_t ρ dρ at every node: 8-point rules on each gap of a local
    // interpolant of the node values, then suffix sums. Local interpolation keeps
    // the integral exactly zero outside the support of compact data.
    let grid = state.grid();
    let nodes = grid.nodes();
    let n = nodes.len();
    let mut edges = nodes.to_vec();
    edges.push(grid.r_max());
    let (gx, gw) = gauss_legendre_on(8, 0.0, 1.0);
    let mut pts = Vec::with_capacity(8 * n);
    for i in 0..n {
        let (a, b) = (edges[i], edges[i + 1]);
        pts.extend(gx.iter().map(|x| a + (b - a) * x));
    }
    let vals: Vec<f64> = pts.iter().map(|&x| lagrange_local(nodes, state.ut.values(), x, 10)).collect();
    let mut gaps = vec![0.0; n];
    for i in 0..n {
        let h = edges[i + 1] - edges[i];
        gaps[i] = (0..8).map(|j| gw[j] * h * vals[8 * i + j] * pts[8 * i + j]).sum();
    }
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        acc += gaps[i];
        out[i] = acc;
    }
    out
}

/// Fits v ≈ ℓ + C r^{−p} on the outer third of the grid, excluding the last 5%.
/// The residual is relative to the largest |v| anywhere on the grid.
fn fit_limit(nodes: &[f64], values: &[f64], r_max: f64, p: i32) -> Result<(f64, f64)> {
    let lo = 2.0 * r_max / 3.0;
    let hi = 0.95 * r_max;
    let idx: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i] >= lo && nodes[i] <= hi).collect();
    if idx.len() < 3 {
        return Err(WaveLabError::InvalidArgument("fit window holds fewer than three nodes".into()));
    }
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut design = Vec::with_capacity(2 * idx.len());
    let mut y = Vec::with_capacity(idx.len());
    for &i in &idx {
        design.push(1.0);
        design.push((nodes[i] / r_max).powi(-p));
        y.push(values[i] / scale);
    }
    let (coef, rms) = least_squares(&design, 2, &y)?;
    Ok((coef[0] * scale, rms))
}

/// v₀/v₁ profiles of a state and their limits ℓ₀, ℓ₁.
pub fn v0v1_profiles(state: &State) -> Result<V0V1Report> {
    let grid = state.grid();
    let nodes = grid.nodes();
    let peak = state.ut.max_abs();
    let edge = nodes
        .iter()
        .zip(state.ut.values())
        .filter(|(r, _)| **r > 0.95 * grid.r_max())
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    if edge > 1e-10 * peak.max(1.0) {
        return Err(WaveLabError::OutOfRange(format!("u_t has not decayed before r_max (edge amplitude {edge:.2e})")));
    }
    let v0 = state.u.map(|r, v| r * r * r * v);
    let tails = tail_integrals(state);
    let v1: Vec<f64> = nodes.iter().zip(&tails).map(|(r, t)| r * t).collect();
    let v1 = RadialField::new(grid.clone(), v1)?;
    let (l0, residual0) = fit_limit(nodes, v0.values(), grid.r_max(), 4)?;
    let (l1, residual1) = fit_limit(nodes, v1.values(), grid.r_max(), 2)?;
    Ok(V0V1Report {
        v0,
        v1,
        ell0: (residual0 <= FIT_TOL).then_some(l0),
        ell1: (residual1 <= FIT_TOL).then_some(l1),
        residual0,
        residual1,
    })
}

/// Measured sides of the v₀/v₁ difference estimates at one radius pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DifferenceRow {
    pub r: f64,
    pub r2: f64,
    pub lhs0: f64,
    pub rhs0: f64,
    pub ratio0: Option<f64>,
    pub lhs1: f64,
    pub rhs1: f64,
    pub ratio1: Option<f64>,
    /// Both right-hand sides vanish.
    pub degenerate: bool,
}

fn v_at(state: &State, r: f64) -> (f64, f64) {
    let u = state.u.eval_at(&[r])[0];
    let r_max = state.grid().r_max();
    let tail = if r < r_max {
        let rule = CompositeRule::new(r, r_max, 16, 16);
        let vals = state.ut.eval_at(&rule.nodes);
        let f: Vec<f64> = vals.iter().zip(&rule.nodes).map(|(v, x)| v * x).collect();
        rule.integrate(&f)
    } else {
        0.0
    };
    (r * r * r * u, r * tail)
}

/// |v₀(r)−v₀(r')| against r⁻⁴|v₀(r)|³ + r⁻¹|v₁(r)|³ and |v₁(r)−v₁(r')| against
/// r⁻⁵|v₀(r)|³ + r⁻²|v₁(r)|³, for r ≤ r' ≤ 2r.
pub fn difference_report(state: &State, r_pairs: &[(f64, f64)]) -> Result<Vec<DifferenceRow>> {
    r_pairs
        .iter()
        .map(|&(r, r2)| {
            if !(r > 0.0 && r <= r2 && r2 <= 2.0 * r) {
                return Err(WaveLabError::InvalidArgument(format!("pair ({r}, {r2}) violates r <= r' <= 2r")));
            }
            let (a0, a1) = v_at(state, r);
            let (b0, b1) = v_at(state, r2);
            let c0 = a0.abs().powi(3);
            let c1 = a1.abs().powi(3);
            let rhs0 = c0 / r.powi(4) + c1 / r;
            let rhs1 = c0 / r.powi(5) + c1 / (r * r);
            let lhs0 = (a0 - b0).abs();
            let lhs1 = (a1 - b1).abs();
            Ok(DifferenceRow {
                r,
                r2,
                lhs0,
                rhs0,
                ratio0: (rhs0 > 0.0).then(|| lhs0 / rhs0),
                lhs1,
                rhs1,
                ratio1: (rhs1 > 0.0).then(|| lhs1 / rhs1),
                degenerate: rhs0 == 0.0 && rhs1 == 0.0,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_spectral::RadialGrid;

    #[test]
    fn zero_state_profiles_vanish() {
        let g = RadialGrid::new(128, 20.0).unwrap();
        let s = State::zeros(g);
        let rep = v0v1_profiles(&s).unwrap();
        assert_eq!(rep.ell0, Some(0.0));
        assert_eq!(rep.ell1, Some(0.0));
        let rows = difference_report(&s, &[(1.0, 1.5)]).unwrap();
        assert!(rows[0].degenerate && rows[0].ratio0.is_none());
    }

    #[test]
    fn compact_data_has_zero_limits() {
        let g = RadialGrid::new(256, 30.0).unwrap();
        let bump = |r: f64| if r < 5.0 { (-1.0 / (1.0 - (r / 5.0).powi(2))).exp() } else { 0.0 };
        let s = State::from_fns(g, 0.0, bump, bump);
        let rep = v0v1_profiles(&s).unwrap();
        assert!(rep.ell0.unwrap().abs() < 1e-12 && rep.ell1.unwrap().abs() < 1e-12);
        assert!(rep.residual0 < 1e-12 && rep.residual1 < 1e-12);
    }

    #[test]
    fn v1_matches_closed_form() {
        // u_t = e^{−r²}: ∫_r^∞ ρ e^{−ρ²} dρ = e^{−r²}/2.
        let g = RadialGrid::new(256, 12.0).unwrap();
        let s = State::from_fns(g, 0.0, |_| 0.0, |r| (-r * r).exp());
        let rep = v0v1_profiles(&s).unwrap();
        for (r, v) in s.grid().nodes().iter().zip(rep.v1.values()) {
            assert!((v - 0.5 * r * (-r * r).exp()).abs() < 1e-12);
        }
        assert!(difference_report(&s, &[(1.0, 3.0)]).is_err());
    }
}
