//! Hyper-dual numbers a + bε₁ + cε₂ + dε₁ε₂ with ε₁² = ε₂² = 0.
//!
//! Seeding one variable with b = c = 1 gives its exact first and second
//! derivatives in b and d, free of truncation and cancellation error.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperDual {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl HyperDual {
    pub fn constant(a: f64) -> Self {
        Self { a, b: 0.0, c: 0.0, d: 0.0 }
    }

    /// The variable x seeded for first and second derivatives.
    pub fn variable(x: f64) -> Self {
        Self { a: x, b: 1.0, c: 1.0, d: 0.0 }
    }

    pub fn first(self) -> f64 {
        self.b
    }

    pub fn second(self) -> f64 {
        self.d
    }

    /// f(self) from f(a), f'(a), f''(a).
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Self { a: f0, b: f1 * self.b, c: f1 * self.c, d: f1 * self.d + f2 * self.b * self.c }
    }

    pub fn recip(self) -> Self {
        let x = self.a;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.a.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn atan(self) -> Self {
        let x = self.a;
        let q = 1.0 / (1.0 + x * x);
        self.chain(x.atan(), q, -2.0 * x * q * q)
    }

    pub fn powi(self, n: i32) -> Self {
        let x = self.a;
        let nf = n as f64;
        self.chain(x.powi(n), nf * x.powi(n - 1), nf * (nf - 1.0) * x.powi(n - 2))
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { a: self.a + o.a, b: self.b + o.b, c: self.c + o.c, d: self.d + o.d }
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for HyperDual {
    type Output = Self;
    fn neg(self) -> Self {
        Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            a: self.a * o.a,
            b: self.a * o.b + self.b * o.a,
            c: self.a * o.c + self.c * o.a,
            d: self.a * o.d + self.b * o.c + self.c * o.b + self.d * o.a,
        }
    }
}

impl Div for HyperDual {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Mul<f64> for HyperDual {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self { a: self.a * k, b: self.b * k, c: self.c * k, d: self.d * k }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_composite() {
        // f(x) = sin(x²)/x at x = 0.8
        let x = HyperDual::variable(0.8);
        let f = (x * x).sin() / x;
        let g = |x: f64| (x * x).sin() / x;
        let h = 1e-4;
        let d1 = (g(0.8 + h) - g(0.8 - h)) / (2.0 * h);
        let d2 = (g(0.8 + h) - 2.0 * g(0.8) + g(0.8 - h)) / (h * h);
        assert!((f.first() - d1).abs() < 1e-7);
        assert!((f.second() - d2).abs() < 1e-5);
        let a = HyperDual::variable(0.3).atan();
        assert!((a.first() - 1.0 / 1.09).abs() < 1e-15);
    }
}
