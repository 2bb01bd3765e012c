//! Even Chebyshev collocation on [0, 1].
//!
//! A function of y ∈ [0, 1] is stored at the nonnegative Chebyshev–Lobatto
//! points of [−1, 1] and extended evenly, which builds the regularity w_y(0) = 0
//! into every derivative.

use crate::quad::gauss_legendre_on;

#[derive(Debug, Clone)]
pub struct EvenCheb {
    /// Full-grid degree N (even).
    pub degree: usize,
    /// Collocation points, ascending from 0 to 1.
    pub y: Vec<f64>,
    /// First derivative, row-major n×n.
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    /// Δ = ∂²_y + (4/y)∂_y, with 5∂²_y at y = 0.
    pub lap: Vec<f64>,
    full_nodes: Vec<f64>,
    full_weights: Vec<f64>,
}

impl EvenCheb {
    /// `degree` must be even and at least 4.
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 4 && degree % 2 == 0, "Chebyshev degree must be even and >= 4");
        let nn = degree;
        let x: Vec<f64> = (0..=nn).map(|j| (std::f64::consts::PI * j as f64 / nn as f64).cos()).collect();
        let c = |j: usize| if j == 0 || j == nn { 2.0 } else { 1.0 };
        let m = nn + 1;
        let mut d = vec![0.0; m * m];
        for i in 0..m {
            let mut diag = 0.0;
            for j in 0..m {
                if i != j {
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    let v = c(i) / c(j) * sign / (x[i] - x[j]);
                    d[i * m + j] = v;
                    diag -= v;
                }
            }
            d[i * m + i] = diag;
        }
        let mut dd = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                let a = d[i * m + k];
                if a != 0.0 {
                    for j in 0..m {
                        dd[i * m + j] += a * d[k * m + j];
                    }
                }
            }
        }
        let half = nn / 2;
        let n = half + 1;
        // Ascending index k ↔ full index j = half − k; fold j and N − j together.
        let full_of = |k: usize| half - k;
        let fold = |mat: &[f64]| {
            let mut out = vec![0.0; n * n];
            for k in 0..n {
                let i = full_of(k);
                for j in 0..m {
                    let jj = j.min(nn - j);
                    let l = half - jj;
                    out[k * n + l] += mat[i * m + j];
                }
            }
            out
        };
        let d1 = fold(&d);
        let d2 = fold(&dd);
        let y: Vec<f64> = (0..n).map(|k| x[full_of(k)].abs()).collect();
        let mut y = y;
        y[0] = 0.0;
        let mut lap = vec![0.0; n * n];
        for k in 0..n {
            for l in 0..n {
                lap[k * n + l] = if k == 0 { 5.0 * d2[l] } else { d2[k * n + l] + 4.0 / y[k] * d1[k * n + l] };
            }
        }
        let full_weights: Vec<f64> = (0..=nn)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == nn {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        Self { degree, y, d1, d2, lap, full_nodes: x, full_weights }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn apply(&self, mat: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n).map(|k| (0..n).map(|l| mat[k * n + l] * v[l]).sum()).collect()
    }

    /// Barycentric evaluation of the even interpolant at y ∈ [0, 1].
    pub fn eval(&self, values: &[f64], y: f64) -> f64 {
        self.eval_parity(values, y, 1.0)
    }

    /// Evaluation of the odd extension, for derivatives of even functions.
    pub fn eval_odd(&self, values: &[f64], y: f64) -> f64 {
        self.eval_parity(values, y, -1.0)
    }

    fn eval_parity(&self, values: &[f64], y: f64, parity: f64) -> f64 {
        let nn = self.degree;
        let half = nn / 2;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..=nn {
            let diff = y - self.full_nodes[j];
            let v = if j > half { parity * values[half - (nn - j)] } else { values[half - j] };
            if diff == 0.0 {
                return v;
            }
            let t = self.full_weights[j] / diff;
            num += t * v;
            den += t;
        }
        num / den
    }
}

/// Gauss–Legendre rule on [0, 1 − eps], graded geometrically towards the right end.
pub fn graded_rule(eps: f64) -> (Vec<f64>, Vec<f64>) {
    let mut edges = vec![0.0, 0.25, 0.5];
    let mut gap = 0.5;
    while gap > 2.0 * eps {
        gap *= 0.5;
        edges.push(1.0 - gap);
    }
    edges.push(1.0 - eps);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for e in edges.windows(2) {
        if e[1] > e[0] {
            let (x, w) = gauss_legendre_on(16, e[0], e[1]);
            xs.extend(x);
            ws.extend(w);
        }
    }
    (xs, ws)
}
