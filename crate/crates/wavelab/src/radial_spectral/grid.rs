use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::{kernel, kernel_derivative, INV_TWO_PI_5};
use crate::error::{Result, WaveLabError};
use crate::quad;

/// Default ratio between ρ_max and n / r_max.
pub const DEFAULT_BANDWIDTH: f64 = 1.0;

/// Gauss–Legendre radial grid on (0, r_max] with its frequency companion on (0, ρ_max].
///
/// The transform matrices are built on first use and cached; a grid is
/// meant to be shared between fields through an `Arc`.
#[derive(Debug)]
pub struct RadialGrid {
    n: usize,
    r_max: f64,
    bandwidth: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    freq_nodes: Vec<f64>,
    freq_weights: Vec<f64>,
    forward: OnceLock<Vec<f64>>,
    inverse: OnceLock<Vec<f64>>,
    inverse_dr: OnceLock<Vec<f64>>,
}

/// Serializable description of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub r_max: f64,
    #[serde(default = "default_bandwidth")]
    pub bandwidth: f64,
}

fn default_bandwidth() -> f64 {
    DEFAULT_BANDWIDTH
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<RadialGrid>> {
        RadialGrid::with_bandwidth(self.n, self.r_max, self.bandwidth)
    }
}

impl RadialGrid {
    /// Grid with `n` nodes on (0, r_max] and the default bandwidth.
    pub fn new(n: usize, r_max: f64) -> Result<Arc<Self>> {
        Self::with_bandwidth(n, r_max, DEFAULT_BANDWIDTH)
    }

    /// Grid with ρ_max = bandwidth · n / r_max.
    pub fn with_bandwidth(n: usize, r_max: f64, bandwidth: f64) -> Result<Arc<Self>> {
        if !(8..=16384).contains(&n) {
            return Err(WaveLabError::InvalidArgument(format!("grid size n = {n} outside [8, 16384]")));
        }
        if !(r_max.is_finite() && r_max > 0.0) || !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(WaveLabError::InvalidArgument("grid needs positive finite r_max and bandwidth".into()));
        }
        let (x, w) = quad::gauss_legendre(n);
        let half = 0.5 * r_max;
        let nodes: Vec<f64> = x.iter().map(|xi| half * (xi + 1.0)).collect();
        let weights: Vec<f64> = w.iter().zip(&nodes).map(|(wi, r)| half * wi * r.powi(4)).collect();
        let rho_max = bandwidth * n as f64 / r_max;
        let rhalf = 0.5 * rho_max;
        let freq_nodes: Vec<f64> = x.iter().map(|xi| rhalf * (xi + 1.0)).collect();
        let freq_weights: Vec<f64> = w.iter().zip(&freq_nodes).map(|(wi, p)| rhalf * wi * p.powi(4)).collect();
        Ok(Arc::new(Self {
            n,
            r_max,
            bandwidth,
            nodes,
            weights,
            freq_nodes,
            freq_weights,
            forward: OnceLock::new(),
            inverse: OnceLock::new(),
            inverse_dr: OnceLock::new(),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
    pub fn rho_max(&self) -> f64 {
        self.bandwidth * self.n as f64 / self.r_max
    }
    pub fn rho_min(&self) -> f64 {
        self.freq_nodes[0]
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    /// Weights for ∫₀^{r_max} f(r) r⁴ dr.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn freq_nodes(&self) -> &[f64] {
        &self.freq_nodes
    }
    /// Weights for ∫₀^{ρ_max} g(ρ) ρ⁴ dρ.
    pub fn freq_weights(&self) -> &[f64] {
        &self.freq_weights
    }
    pub fn spec(&self) -> GridSpec {
        GridSpec { n: self.n, r_max: self.r_max, bandwidth: self.bandwidth }
    }

    /// Typical node spacing, used as a CFL proxy.
    pub fn spacing(&self) -> f64 {
        self.r_max / self.n as f64
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        std::ptr::eq(self, other)
            || (self.n == other.n && self.r_max == other.r_max && self.bandwidth == other.bandwidth)
    }

    /// Row-major matrix A with f̂ = A f.
    pub(crate) fn forward_matrix(&self) -> &[f64] {
        self.forward.get_or_init(|| {
            let n = self.n;
            let mut a = vec![0.0; n * n];
            for (i, rho) in self.freq_nodes.iter().enumerate() {
                let row = &mut a[i * n..(i + 1) * n];
                for (j, (r, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
                    row[j] = kernel(rho * r) * w;
                }
            }
            a
        })
    }

    /// Row-major matrix B with f = B f̂.
    pub(crate) fn inverse_matrix(&self) -> &[f64] {
        self.inverse.get_or_init(|| {
            let n = self.n;
            let mut b = vec![0.0; n * n];
            for (i, r) in self.nodes.iter().enumerate() {
                let row = &mut b[i * n..(i + 1) * n];
                for (j, (rho, w)) in self.freq_nodes.iter().zip(&self.freq_weights).enumerate() {
                    row[j] = INV_TWO_PI_5 * kernel(r * rho) * w;
                }
            }
            b
        })
    }

    /// Row-major matrix with ∂_r f = B_r f̂.
    pub(crate) fn inverse_dr_matrix(&self) -> &[f64] {
        self.inverse_dr.get_or_init(|| {
            let n = self.n;
            let mut b = vec![0.0; n * n];
            for (i, r) in self.nodes.iter().enumerate() {
                let row = &mut b[i * n..(i + 1) * n];
                for (j, (rho, w)) in self.freq_nodes.iter().zip(&self.freq_weights).enumerate() {
                    row[j] = INV_TWO_PI_5 * rho * kernel_derivative(r * rho) * w;
                }
            }
            b
        })
    }

    /// Quadrature check: Σ w_j against r_max⁵/5.
    pub fn volume_check(&self) -> f64 {
        let exact = self.r_max.powi(5) / 5.0;
        (self.weights.iter().sum::<f64>() - exact).abs() / exact
    }
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

/// Lowest frequency that a grid of radius r_max can distinguish from zero.
pub fn fundamental_frequency(r_max: f64) -> f64 {
    PI / r_max
}
