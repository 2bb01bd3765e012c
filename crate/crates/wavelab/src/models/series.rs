//! Cancellation-free evaluation of the wave-map nonlinearity factors.

/// Number of Taylor terms used below the switch point.
const TERMS: usize = 8;

/// Z_{S³}(x) = (2x − sin 2x)/x³, so that F_{S³}(r, u) = u³ Z_{S³}(ru).
pub fn z_s3(x: f64) -> f64 {
    if (2.0 * x).abs() < 0.5 {
        // Σ_{m≥1} (−1)^{m+1} 2^{2m+1} x^{2m−2} / (2m+1)!
        let x2 = x * x;
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut two = 8.0;
        let mut fact = 6.0;
        for m in 1..=TERMS {
            let mf = m as f64;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * two * pow / fact;
            pow *= x2;
            two *= 4.0;
            fact *= (2.0 * mf + 2.0) * (2.0 * mf + 3.0);
        }
        sum
    } else {
        (2.0 * x - (2.0 * x).sin()) / (x * x * x)
    }
}

/// Z_{H³}(x) = (2x − sinh 2x)/x³.
pub fn z_h3(x: f64) -> f64 {
    if (2.0 * x).abs() < 0.5 {
        let x2 = x * x;
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut two = 8.0;
        let mut fact = 6.0;
        for m in 1..=TERMS {
            let mf = m as f64;
            sum -= two * pow / fact;
            pow *= x2;
            two *= 4.0;
            fact *= (2.0 * mf + 2.0) * (2.0 * mf + 3.0);
        }
        sum
    } else {
        (2.0 * x - (2.0 * x).sinh()) / (x * x * x)
    }
}

/// (sin²x − x²)/x⁴; the S³ potential is u⁴ times this at x = ru.
pub fn g_s3(x: f64) -> f64 {
    if x.abs() < 0.5 {
        // Σ_{m≥2} (−1)^{m+1} 2^{2m−1} x^{2m−4} / (2m)!
        let x2 = x * x;
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut two = 8.0;
        let mut fact = 24.0;
        for m in 2..2 + TERMS {
            let mf = m as f64;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * two * pow / fact;
            pow *= x2;
            two *= 4.0;
            fact *= (2.0 * mf + 1.0) * (2.0 * mf + 2.0);
        }
        sum
    } else {
        let s = x.sin();
        (s * s - x * x) / (x * x * x * x)
    }
}

/// (sinh²x − x²)/x⁴.
pub fn g_h3(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut two = 8.0;
        let mut fact = 24.0;
        for m in 2..2 + TERMS {
            let mf = m as f64;
            sum += two * pow / fact;
            pow *= x2;
            two *= 4.0;
            fact *= (2.0 * mf + 1.0) * (2.0 * mf + 2.0);
        }
        sum
    } else {
        let s = x.sinh();
        (s * s - x * x) / (x * x * x * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_meet_continuously() {
        for x in [0.24f64, 0.25, 0.26] {
            let direct_s = (2.0 * x - (2.0 * x).sin()) / (x * x * x);
            let direct_h = (2.0 * x - (2.0 * x).sinh()) / (x * x * x);
            assert!((z_s3(x) - direct_s).abs() < 1e-12);
            assert!((z_h3(x) - direct_h).abs() < 1e-12);
        }
        for x in [0.49f64, 0.5, 0.51] {
            let s = x.sin();
            let h = x.sinh();
            assert!((g_s3(x) - (s * s - x * x) / x.powi(4)).abs() < 1e-12);
            assert!((g_h3(x) - (h * h - x * x) / x.powi(4)).abs() < 1e-12);
        }
    }

    #[test]
    fn limits_at_zero() {
        assert!((z_s3(0.0) - 4.0 / 3.0).abs() < 1e-16);
        assert!((z_h3(0.0) + 4.0 / 3.0).abs() < 1e-16);
        assert!((g_s3(0.0) + 1.0 / 3.0).abs() < 1e-16);
        assert!((g_h3(0.0) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn sign_and_bound_of_z_factors() {
        for i in -5000..=5000 {
            let x = i as f64 * 0.01;
            let s = z_s3(x);
            assert!((0.0..=4.0 / 3.0 + 1e-15).contains(&s), "x={x} z={s}");
            if x != 0.0 {
                assert!(z_h3(x) < 0.0);
            }
        }
    }
}
