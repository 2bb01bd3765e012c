//! Dormand–Prince 5(4) with step control and a fixed-step Gragg–Bulirsch–Stoer
//! integrator used as an independent check.

use crate::error::{Result, WaveLabError};

/// Step-control settings for [`dopri5`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-20, max_steps: 2_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn axpy<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], coefs: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, &c) in ks.iter().zip(coefs) {
        if c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// Integrates y' = f(t, y) from (t0, y0) through the monotone list `outputs`,
/// landing on each output exactly. `escape` stops the run with an error.
pub fn dopri5<const N: usize, F, E>(
    f: F,
    t0: f64,
    y0: [f64; N],
    outputs: &[f64],
    tol: Tolerances,
    escape: E,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    E: Fn(f64, &[f64; N]) -> Option<WaveLabError>,
{
    let mut out = Vec::with_capacity(outputs.len());
    if outputs.is_empty() {
        return Ok(out);
    }
    let dir = if outputs[outputs.len() - 1] >= t0 { 1.0 } else { -1.0 };
    if outputs.windows(2).any(|w| (w[1] - w[0]) * dir < 0.0) || (outputs[0] - t0) * dir < 0.0 {
        return Err(WaveLabError::InvalidArgument("output times must be monotone away from t0".into()));
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * 1e-3;
    let mut k1 = f(t, &y);
    let mut steps = 0;
    for &target in outputs {
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > tol.max_steps {
                return Err(WaveLabError::Integrator(format!("step budget exhausted at t = {t}")));
            }
            let mut last = false;
            if (t + h - target) * dir >= 0.0 {
                h = target - t;
                last = true;
            }
            let mut ks = [[0.0; N]; 7];
            ks[0] = k1;
            for s in 1..7 {
                let ys = axpy(&y, h, &ks[..s], &A[s][..s]);
                ks[s] = f(t + C[s] * h, &ys);
            }
            let y5 = axpy(&y, h, &ks, &B5);
            let y4 = axpy(&y, h, &ks, &B4);
            let mut err = 0.0f64;
            for i in 0..N {
                let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
                err = err.max(((y5[i] - y4[i]) / sc).abs());
            }
            if !err.is_finite() {
                h *= 0.1;
                if h.abs() < 1e-14 * t.abs().max(1.0) {
                    return Err(WaveLabError::Integrator(format!("non-finite state near t = {t}")));
                }
                continue;
            }
            if err <= 1.0 {
                t = if last { target } else { t + h };
                y = y5;
                k1 = ks[6];
                if let Some(e) = escape(t, &y) {
                    return Err(e);
                }
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !(last && err <= 1.0) {
                h *= factor;
            } else {
                // Keep the natural step size after a clipped final step.
                h = dir * h.abs().max((h * factor).abs());
            }
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                return Err(WaveLabError::Integrator(format!("step size underflow at t = {t}")));
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Fixed macro-step Gragg–Bulirsch–Stoer: modified midpoint with n = 2, 4, …, 2·levels
/// substeps and polynomial extrapolation in h².
pub fn gbs_fixed<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64, macro_steps: usize, levels: usize) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let big_h = (t1 - t0) / macro_steps as f64;
    let mut y = y0;
    let mut t = t0;
    for _ in 0..macro_steps {
        // prev[k] holds the k-th extrapolation of the previous level.
        let mut prev: Vec<[f64; N]> = Vec::with_capacity(levels);
        for j in 1..=levels {
            let n = 2 * j;
            let h = big_h / n as f64;
            let mut z0 = y;
            let d = f(t, &y);
            let mut z1 = [0.0; N];
            for i in 0..N {
                z1[i] = y[i] + h * d[i];
            }
            for m in 1..n {
                let d = f(t + m as f64 * h, &z1);
                let mut z2 = [0.0; N];
                for i in 0..N {
                    z2[i] = z0[i] + 2.0 * h * d[i];
                }
                z0 = z1;
                z1 = z2;
            }
            let d = f(t + big_h, &z1);
            let mut row = vec![[0.0; N]; j];
            for i in 0..N {
                row[0][i] = 0.5 * (z0[i] + z1[i] + h * d[i]);
            }
            // Aitken–Neville in the variable h².
            for k in 1..j {
                let ratio = (n as f64 / (2 * (j - k)) as f64).powi(2);
                for i in 0..N {
                    row[k][i] = row[k - 1][i] + (row[k - 1][i] - prev[k - 1][i]) / (ratio - 1.0);
                }
            }
            prev = row;
        }
        let table = prev;
        y = table[levels - 1];
        t += big_h;
    }
    y
}
