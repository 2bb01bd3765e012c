use std::f64::consts::SQRT_2;

use crate::error::{Result, WaveLabError};

/// φ_T(t) = √2/(T − t), the spatially constant solution of φ_tt = φ³.
pub fn exact_ode_blowup(big_t: f64, t: f64) -> Result<f64> {
    if !(t < big_t) {
        return Err(WaveLabError::Domain(format!("ODE blow-up profile needs t < T (t = {t}, T = {big_t})")));
    }
    Ok(SQRT_2 / (big_t - t))
}

/// ψ(t, r) = 2 arctan(r/t) and ψ_t = −2r/(t² + r²).
pub fn turok_spergel(t: f64, r: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) || r < 0.0 {
        return Err(WaveLabError::Domain(format!("explicit wave map needs t > 0, r ≥ 0 (t = {t}, r = {r})")));
    }
    Ok((2.0 * (r / t).atan(), -2.0 * r / (t * t + r * r)))
}

/// The same solution in u = ψ/r variables, with the regular limit at r = 0.
pub fn turok_spergel_u(t: f64, r: f64) -> Result<(f64, f64)> {
    let (psi, psi_t) = turok_spergel(t, r)?;
    if r < 1e-6 * t {
        let x = r / t;
        // 2 arctan(x)/r = (2/t)(1 − x²/3 + x⁴/5)
        let u = 2.0 / t * (1.0 - x * x / 3.0 + x.powi(4) / 5.0);
        let ut = -2.0 / (t * t + r * r);
        return Ok((u, ut));
    }
    Ok((psi / r, psi_t / r))
}
