use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::model::NormalFormCoefficients;

/// Coefficients of `P±(φ) = A± cos 2φ + B± sin 2φ + C cos 4φ + D sin 4φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abcd {
    pub a_plus: f64,
    pub a_minus: f64,
    pub b_plus: f64,
    pub b_minus: f64,
    pub c: f64,
    pub d: f64,
}

impl Abcd {
    /// `(A, B)` for one side: `sign = +1` or `-1`.
    pub fn side(&self, sign: f64) -> (f64, f64) {
        if sign >= 0.0 {
            (self.a_plus, self.b_plus)
        } else {
            (self.a_minus, self.b_minus)
        }
    }

    /// `P±(φ)`.
    pub fn eval(&self, sign: f64, phi: f64) -> f64 {
        let (a, b) = self.side(sign);
        a * (2.0 * phi).cos() + b * (2.0 * phi).sin() + self.c * (4.0 * phi).cos()
            + self.d * (4.0 * phi).sin()
    }
}

pub fn abcd(c: &NormalFormCoefficients) -> Abcd {
    let k = 35.0 / 8.0;
    let diff = c.c422 - c.c421;
    Abcd {
        a_plus: k * diff + 3.0 * PI * c.c423 + 45.0 * c.c445,
        a_minus: k * diff - 3.0 * PI * c.c423 + 45.0 * c.c445,
        b_plus: k * c.c423 + 3.0 * PI * (c.c421 - c.c422) + 45.0 * c.c444,
        b_minus: k * c.c423 - 3.0 * PI * (c.c421 - c.c422) + 45.0 * c.c444,
        c: 36.0 * c.c443,
        d: -36.0 * c.c442,
    }
}

/// `(b̃, ω_b)` with `(c31, c32) = b̃ (sin ω_b, −cos ω_b)`, `ω_b ∈ [0, 2π)`.
pub fn b_polar(c31: f64, c32: f64) -> (f64, f64) {
    let b = c31.hypot(c32);
    if b == 0.0 {
        return (0.0, 0.0);
    }
    let w = c31.atan2(-c32).rem_euclid(TAU);
    (b, if w >= TAU { 0.0 } else { w })
}

/// Complex coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly(pub Vec<Complex64>);

impl ComplexPoly {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> ComplexPoly {
        ComplexPoly(self.0.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect())
    }

    /// Degree after dropping vanishing leading coefficients.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| c.norm() != 0.0)
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `zⁿ · conj(P(1/z̄)) = P(z)`: the coefficient list is conjugate-palindromic.
    pub fn is_self_inversive(&self, tol: f64) -> bool {
        let n = self.0.len();
        (0..n).all(|k| (self.0[k] - self.0[n - 1 - k].conj()).norm() <= tol)
    }
}

/// `P̃±(z) = μz⁴ + ν±z³ + ν̄±z + μ̄` and `T̃(z) = bz³ + b̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomials {
    pub mu: Complex64,
    pub nu_plus: Complex64,
    pub nu_minus: Complex64,
    pub b: Complex64,
    pub p_plus: ComplexPoly,
    pub p_minus: ComplexPoly,
    pub t: ComplexPoly,
}

pub fn p_tilde(mu: Complex64, nu: Complex64) -> ComplexPoly {
    ComplexPoly(vec![mu.conj(), nu.conj(), Complex64::new(0.0, 0.0), nu, mu])
}

pub fn t_tilde(b: Complex64) -> ComplexPoly {
    let z = Complex64::new(0.0, 0.0);
    ComplexPoly(vec![b.conj(), z, z, b])
}

pub fn build_polynomials(k: &Abcd, c31: f64, c32: f64) -> Polynomials {
    let mu = Complex64::new(k.c, -k.d) * 0.5;
    let nu_plus = Complex64::new(k.a_plus, -k.b_plus) * 0.5;
    let nu_minus = Complex64::new(k.a_minus, -k.b_minus) * 0.5;
    let b = Complex64::new(c31, c32);
    Polynomials {
        mu,
        nu_plus,
        nu_minus,
        b,
        p_plus: p_tilde(mu, nu_plus),
        p_minus: p_tilde(mu, nu_minus),
        t: t_tilde(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abcd_examples() {
        let z = abcd(&NormalFormCoefficients::default());
        assert_eq!((z.a_plus, z.a_minus, z.b_plus, z.b_minus, z.c, z.d), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));

        let k = abcd(&NormalFormCoefficients { c423: 1.0, ..Default::default() });
        assert_eq!(k.a_plus, 3.0 * PI);
        assert_eq!(k.a_minus, -3.0 * PI);
        assert_eq!(k.b_plus, 35.0 / 8.0);
        assert_eq!(k.b_minus, 35.0 / 8.0);
        assert_eq!((k.c, k.d), (0.0, 0.0));

        let k = abcd(&NormalFormCoefficients { c442: 1.0, ..Default::default() });
        assert_eq!(k.d, -36.0);
        assert_eq!((k.a_plus, k.a_minus, k.b_plus, k.b_minus, k.c), (0.0, 0.0, 0.0, 0.0, 0.0));

        let k = abcd(&NormalFormCoefficients { c443: 1.0, ..Default::default() });
        assert_eq!(k.c, 36.0);
    }

    #[test]
    fn b_polar_examples() {
        assert_eq!(b_polar(0.0, -1.0), (1.0, 0.0));
        let (b, w) = b_polar(1.0, 0.0);
        assert_eq!(b, 1.0);
        assert!((w - PI / 2.0).abs() < 1e-15);
        assert_eq!(b_polar(0.0, 0.0), (0.0, 0.0));
        let (b, w) = b_polar(0.3, 0.4);
        assert!((b * w.sin() - 0.3).abs() < 1e-15 && (-b * w.cos() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn polynomial_shapes() {
        let p = p_tilde(Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(p.0, vec![0.5.into(), 0.0.into(), 0.0.into(), 0.0.into(), 0.5.into()]);
        let p = p_tilde(Complex64::new(0.3, -0.7), Complex64::new(-1.1, 0.2));
        assert!(p.is_self_inversive(0.0));
        assert_eq!(p.0[2], Complex64::new(0.0, 0.0));
        let t = t_tilde(Complex64::new(1.0, 0.0));
        assert_eq!(t.degree(), Some(3));
        assert!(t.is_self_inversive(0.0));
    }

    #[test]
    fn p_tilde_on_the_circle_realizes_the_trig_polynomial() {
        // P̃(e^{2iφ}) = 2 e^{4iφ} P(φ) / 2 ... i.e. e^{4iφ}·P(φ)
        let k = Abcd { a_plus: 0.7, a_minus: -0.2, b_plus: 1.3, b_minus: 0.4, c: -0.9, d: 0.35 };
        let polys = build_polynomials(&k, 0.3, -0.2);
        for phi in [0.0, 0.4, 1.9, 3.3, 5.0] {
            let z = Complex64::from_polar(1.0, 2.0 * phi);
            let lhs = polys.p_plus.eval(z);
            let rhs = Complex64::from_polar(1.0, 4.0 * phi) * k.eval(1.0, phi);
            assert!((lhs - rhs).norm() < 1e-13);
        }
        // T̃(e^{2iφ}) = 2 b̃ e^{3iφ} sin(3φ + ω_b)
        let (bt, w) = b_polar(0.3, -0.2);
        for phi in [0.1, 2.2, 4.4] {
            let z = Complex64::from_polar(1.0, 2.0 * phi);
            let rhs = Complex64::from_polar(2.0 * bt * (3.0 * phi + w).sin(), 3.0 * phi);
            assert!((polys.t.eval(z) - rhs).norm() < 1e-13);
        }
    }
}
