//! Quadrature and interpolation primitives.
//!
//! Gauss–Legendre rules (global and composite), barycentric interpolation on
//! arbitrary nodes, and an adaptive Gauss–Kronrod integrator for oscillatory
//! one-dimensional integrals.

use num_complex::Complex64;

use crate::error::{Result, WaveLabError};

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        // Tricomi's initial guess, then Newton on P_n.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut z = theta.cos() * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 * z.abs().max(1e-3) {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    (x.iter().map(|xi| c + h * xi).collect(), w.iter().map(|wi| h * wi).collect())
}

/// Composite Gauss–Legendre rule: `panels` equal panels with `m` nodes each.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub a: f64,
    pub b: f64,
    pub panels: usize,
    pub m: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Panel breakpoints, `panels + 1` of them.
    pub edges: Vec<f64>,
}

impl CompositeRule {
    /// Equal-width panels.
    pub fn new(a: f64, b: f64, panels: usize, m: usize) -> Self {
        let h = (b - a) / panels as f64;
        let mut edges: Vec<f64> = (0..panels).map(|p| a + p as f64 * h).collect();
        edges.push(b);
        Self::from_edges(edges, m)
    }

    /// Geometrically graded panels for integrands with power-law decay; needs 0 < a < b.
    pub fn graded(a: f64, b: f64, panels: usize, m: usize) -> Self {
        let q = (b / a).ln() / panels as f64;
        let mut edges: Vec<f64> = (0..panels).map(|p| a * (q * p as f64).exp()).collect();
        edges.push(b);
        Self::from_edges(edges, m)
    }

    fn from_edges(edges: Vec<f64>, m: usize) -> Self {
        let (x, w) = gauss_legendre(m);
        let panels = edges.len() - 1;
        let mut nodes = Vec::with_capacity(panels * m);
        let mut weights = Vec::with_capacity(panels * m);
        for e in edges.windows(2) {
            let h = e[1] - e[0];
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(e[0] + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        Self { a: edges[0], b: edges[panels], panels, m, nodes, weights, edges }
    }

    /// Bounds of panel `p`.
    pub fn panel(&self, p: usize) -> (f64, f64) {
        (self.edges[p], self.edges[p + 1])
    }

    /// Index of the panel containing `r`, clamped to the rule.
    pub fn locate(&self, r: f64) -> usize {
        self.edges[1..self.panels].partition_point(|&e| e <= r)
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        dot(&self.weights, values)
    }
}

/// Barycentric weights for interpolation on arbitrary distinct nodes.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let scale = if n > 1 { (nodes[n - 1] - nodes[0]).abs() / 4.0 } else { 1.0 };
    (0..n)
        .map(|j| {
            let mut p = 1.0;
            for k in 0..n {
                if k != j {
                    p *= (nodes[j] - nodes[k]) / scale;
                }
            }
            1.0 / p
        })
        .collect()
}

/// Evaluates the interpolating polynomial through (nodes, values) at x.
pub fn barycentric_eval(nodes: &[f64], bw: &[f64], values: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..nodes.len() {
        let d = x - nodes[j];
        if d == 0.0 {
            return values[j];
        }
        let t = bw[j] / d;
        num += t * values[j];
        den += t;
    }
    num / den
}

/// Local Lagrange interpolation with `order` points around x on sorted nodes.
pub fn lagrange_local(nodes: &[f64], values: &[f64], x: f64, order: usize) -> f64 {
    let n = nodes.len();
    let order = order.min(n);
    let idx = nodes.partition_point(|&r| r < x);
    let half = order / 2;
    let start = idx.saturating_sub(half).min(n - order);
    let xs = &nodes[start..start + order];
    let ys = &values[start..start + order];
    let mut acc = 0.0;
    for j in 0..order {
        let mut l = 1.0;
        for k in 0..order {
            if k != j {
                l *= (x - xs[k]) / (xs[j] - xs[k]);
            }
        }
        acc += l * ys[j];
    }
    acc
}

/// Local interpolant and its derivative at x by Neville's scheme.
pub fn lagrange_local_with_derivative(nodes: &[f64], values: &[f64], x: f64, order: usize) -> (f64, f64) {
    let n = nodes.len();
    let order = order.min(n);
    let idx = nodes.partition_point(|&r| r < x);
    let start = idx.saturating_sub(order / 2).min(n - order);
    let xs = &nodes[start..start + order];
    let mut p: Vec<f64> = values[start..start + order].to_vec();
    let mut d = vec![0.0; order];
    for level in 1..order {
        for i in 0..order - level {
            let j = i + level;
            let den = xs[i] - xs[j];
            let pn = ((x - xs[j]) * p[i] - (x - xs[i]) * p[i + 1]) / den;
            let dn = (p[i] + (x - xs[j]) * d[i] - p[i + 1] - (x - xs[i]) * d[i + 1]) / den;
            p[i] = pn;
            d[i] = dn;
        }
    }
    (p[0], d[0])
}

/// Dot product with four independent accumulators.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let chunks = n / 4;
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    for c in 0..chunks {
        let i = 4 * c;
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    let mut s = (s0 + s1) + (s2 + s3);
    for i in 4 * chunks..n {
        s += a[i] * b[i];
    }
    s
}

/// Dense row-major matrix times vector.
pub fn matvec(mat: &[f64], ncols: usize, x: &[f64]) -> Vec<f64> {
    mat.chunks_exact(ncols).map(|row| dot(row, x)).collect()
}

/// Dense row-major matrix times two vectors in one sweep.
pub fn matvec2(mat: &[f64], ncols: usize, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let rows = mat.len() / ncols;
    let mut ox = Vec::with_capacity(rows);
    let mut oy = Vec::with_capacity(rows);
    for row in mat.chunks_exact(ncols) {
        ox.push(dot(row, x));
        oy.push(dot(row, y));
    }
    (ox, oy)
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for i in 0..7 {
        let dx = h * GK_X[i];
        let s = f(c - dx) + f(c + dx);
        k += s * GK_WK[i];
        if i % 2 == 1 {
            g += s * GK_WG[i / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).norm())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of a complex integrand on [a, b].
pub fn adaptive_gk<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Complex64> {
    let mut stack = vec![(a, b, 0usize)];
    let (whole, _) = gk15(f, a, b);
    let mut total = Complex64::new(0.0, 0.0);
    let scale = whole.norm();
    let mut evaluations = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15(f, lo, hi);
        evaluations += 1;
        let tol = abs_tol.max(rel_tol * scale) * (hi - lo) / (b - a);
        if err <= tol || depth >= 40 {
            if depth >= 40 && err > 10.0 * tol {
                return Err(WaveLabError::Quadrature(format!(
                    "subinterval [{lo:.3e}, {hi:.3e}] error {err:.3e} above {tol:.3e}"
                )));
            }
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
        if evaluations > 200_000 {
            return Err(WaveLabError::Quadrature("evaluation budget exhausted".into()));
        }
    }
    Ok(total)
}

/// Real-valued convenience wrapper around [`adaptive_gk`].
pub fn adaptive_gk_real<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let g = |x: f64| Complex64::new(f(x), 0.0);
    adaptive_gk(&g, a, b, abs_tol, rel_tol).map(|z| z.re)
}

/// Ordinary least squares via normal equations solved by Cholesky.
/// `design` is row-major with `p` columns. Returns (coefficients, rms residual).
pub fn least_squares(design: &[f64], p: usize, y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = y.len();
    if design.len() != m * p || m < p {
        return Err(WaveLabError::InvalidArgument("least squares: inconsistent design matrix".into()));
    }
    // Column scaling keeps the normal equations well conditioned.
    let mut scale = vec![0.0; p];
    for i in 0..m {
        for j in 0..p {
            scale[j] += design[i * p + j] * design[i * p + j];
        }
    }
    for s in scale.iter_mut() {
        *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
    }
    let mut ata = vec![0.0; p * p];
    let mut aty = vec![0.0; p];
    for i in 0..m {
        for j in 0..p {
            let aij = design[i * p + j] / scale[j];
            aty[j] += aij * y[i];
            for k in 0..p {
                ata[j * p + k] += aij * design[i * p + k] / scale[k];
            }
        }
    }
    let mut l = vec![0.0; p * p];
    for j in 0..p {
        let mut d = ata[j * p + j];
        for k in 0..j {
            d -= l[j * p + k] * l[j * p + k];
        }
        if d <= 0.0 {
            return Err(WaveLabError::IllPosed("least squares: singular design".into()));
        }
        l[j * p + j] = d.sqrt();
        for i in j + 1..p {
            let mut s = ata[i * p + j];
            for k in 0..j {
                s -= l[i * p + k] * l[j * p + k];
            }
            l[i * p + j] = s / l[j * p + j];
        }
    }
    let mut z = vec![0.0; p];
    for i in 0..p {
        let mut s = aty[i];
        for k in 0..i {
            s -= l[i * p + k] * z[k];
        }
        z[i] = s / l[i * p + i];
    }
    let mut c = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = z[i];
        for k in i + 1..p {
            s -= l[k * p + i] * c[k];
        }
        c[i] = s / l[i * p + i];
    }
    for j in 0..p {
        c[j] /= scale[j];
    }
    let mut ss = 0.0;
    for i in 0..m {
        let fit: f64 = (0..p).map(|j| design[i * p + j] * c[j]).sum();
        ss += (y[i] - fit).powi(2);
    }
    Ok((c, (ss / m as f64).sqrt()))
}

/// Slope, intercept and coefficient of determination of a straight-line fit.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64, 257] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n).min(40) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg} q={q}");
            }
        }
    }

    #[test]
    fn large_rule_weights_sum_to_two() {
        let (x, w) = gauss_legendre(4096);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn composite_rule_matches_exponential_integral() {
        let rule = CompositeRule::new(0.0, 3.0, 7, 12);
        let v: Vec<f64> = rule.nodes.iter().map(|x| x.exp()).collect();
        assert!((rule.integrate(&v) - (3f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn barycentric_reproduces_polynomial() {
        let (x, _) = gauss_legendre_on(9, 1.0, 2.0);
        let bw = barycentric_weights(&x);
        let v: Vec<f64> = x.iter().map(|t| t.powi(7) - 3.0 * t).collect();
        for t in [1.0, 1.37, 2.0] {
            let p = barycentric_eval(&x, &bw, &v, t);
            assert!((p - (t.powi(7) - 3.0 * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn adaptive_gk_oscillatory() {
        let f = |x: f64| Complex64::new(0.0, 40.0 * x).exp();
        let v = adaptive_gk(&f, 0.0, 1.0, 1e-14, 1e-12).unwrap();
        let exact = (Complex64::new(0.0, 40.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((v - exact).norm() < 1e-12);
    }

    #[test]
    fn least_squares_recovers_coefficients() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let mut design = Vec::new();
        let mut y = Vec::new();
        for x in &xs {
            design.extend_from_slice(&[1.0, *x, x * x]);
            y.push(2.0 - 0.5 * x + 0.25 * x * x);
        }
        let (c, rms) = least_squares(&design, 3, &y).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-10 && (c[1] + 0.5).abs() < 1e-10);
        assert!((c[2] - 0.25).abs() < 1e-10 && rms < 1e-12);
    }
}
