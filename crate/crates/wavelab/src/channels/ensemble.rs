use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{channel_report, project_pair, ChannelReport, ExteriorPair, PanelSpec};
use crate::error::{Result, WaveLabError};

/// Seeded ensemble of random exterior data orthogonal to the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub r: f64,
    pub members: usize,
    pub seed: u64,
    /// Gaussian bumps per component.
    pub bumps: usize,
    pub panels: PanelSpec,
}

impl EnsembleConfig {
    pub fn new(r: f64, members: usize, seed: u64) -> Self {
        Self { r, members, seed, bumps: 4, panels: PanelSpec::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub seed: u64,
    pub reports: Vec<ChannelReport>,
    /// Smallest c0_lower over the ensemble: the empirical c₀.
    pub c0_min: f64,
    pub max_orthogonality_defect: f64,
}

struct Bump {
    centre: f64,
    width: f64,
    coef: f64,
}

/// Window exp(−1/(1−ξ²)) on [R/2, 3R] and its derivative.
fn window(r: f64, big_r: f64) -> (f64, f64) {
    let c = 1.75 * big_r;
    let h = 1.25 * big_r;
    let x = (r - c) / h;
    if x.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - x * x;
    let v = (-1.0 / q).exp();
    (v, -v * 2.0 * x / (q * q) / h)
}

fn bump_sum(bumps: &[Bump], r: f64) -> (f64, f64) {
    bumps.iter().fold((0.0, 0.0), |(v, d), b| {
        let z = (r - b.centre) / b.width;
        let e = b.coef * (-0.5 * z * z).exp();
        (v + e, d - e * z / b.width)
    })
}

fn draw_bumps(rng: &mut ChaCha12Rng, n: usize, big_r: f64) -> Vec<Bump> {
    (0..n)
        .map(|_| Bump {
            centre: big_r * rng.random_range(0.5..3.0),
            width: big_r * rng.random_range(0.1..0.5),
            coef: rng.sample(StandardNormal),
        })
        .collect()
}

/// Member `index`: random smooth data on [R/2, 3R], restricted to r ≥ R and
/// projected onto the orthogonal complement of the plane.
pub fn ensemble_member(cfg: &EnsembleConfig, index: usize) -> Result<ExteriorPair> {
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let fb = draw_bumps(&mut rng, cfg.bumps, cfg.r);
    let gb = draw_bumps(&mut rng, cfg.bumps, cfg.r);
    let big_r = cfg.r;
    let pair = ExteriorPair::from_fns(
        big_r,
        3.0 * big_r,
        cfg.panels,
        |r| window(r, big_r).0 * bump_sum(&fb, r).0,
        |r| {
            let (w, dw) = window(r, big_r);
            let (b, db) = bump_sum(&fb, r);
            dw * b + w * db
        },
        |r| window(r, big_r).0 * bump_sum(&gb, r).0,
        (0.0, 0.0),
    )?;
    Ok(project_pair(&pair).1)
}

/// Channel reports for every member, computed in parallel.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleSummary> {
    if cfg.members == 0 || !(cfg.r > 0.0) {
        return Err(WaveLabError::InvalidArgument("ensemble needs members > 0 and R > 0".into()));
    }
    let reports: Vec<ChannelReport> = (0..cfg.members)
        .into_par_iter()
        .map(|i| ensemble_member(cfg, i).map(|p| channel_report(&p)))
        .collect::<Result<_>>()?;
    let c0_min = reports.iter().filter_map(|r| r.c0_lower).fold(f64::INFINITY, f64::min);
    let max_orthogonality_defect = reports.iter().map(|r| r.orthogonality_defect).fold(0.0, f64::max);
    Ok(EnsembleSummary { seed: cfg.seed, reports, c0_min, max_orthogonality_defect })
}
