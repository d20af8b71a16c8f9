//! Minimal forward-mode automatic differentiation.
//!
//! The geodesic vector field is written once, generically over [`Scalar`].
//! Evaluated on `f64` it gives the flow; evaluated on [`Dual`] it carries
//! tangent vectors along, which is how the exponential map's partials with
//! respect to the initial covector are obtained.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    fn from_f64(v: f64) -> Self;
    fn value(&self) -> f64;
    fn scale(self, k: f64) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn scale(self, k: f64) -> Self {
        self * k
    }
}

/// Value plus `N` directional derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<const N: usize> {
    pub v: f64,
    pub d: [f64; N],
}

impl<const N: usize> Dual<N> {
    pub fn constant(v: f64) -> Self {
        Self { v, d: [0.0; N] }
    }

    pub fn new(v: f64, d: [f64; N]) -> Self {
        Self { v, d }
    }
}

impl<const N: usize> Add for Dual<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, o: Self) -> Self {
        self.v += o.v;
        for k in 0..N {
            self.d[k] += o.d[k];
        }
        self
    }
}

impl<const N: usize> AddAssign for Dual<N> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<const N: usize> Sub for Dual<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, o: Self) -> Self {
        self.v -= o.v;
        for k in 0..N {
            self.d[k] -= o.d[k];
        }
        self
    }
}

impl<const N: usize> Mul for Dual<N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let mut d = [0.0; N];
        for k in 0..N {
            d[k] = self.v * o.d[k] + o.v * self.d[k];
        }
        Self { v: self.v * o.v, d }
    }
}

impl<const N: usize> Neg for Dual<N> {
    type Output = Self;
    #[inline]
    fn neg(mut self) -> Self {
        self.v = -self.v;
        for k in 0..N {
            self.d[k] = -self.d[k];
        }
        self
    }
}

impl<const N: usize> Scalar for Dual<N> {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Self::constant(v)
    }
    #[inline]
    fn value(&self) -> f64 {
        self.v
    }
    #[inline]
    fn scale(mut self, k: f64) -> Self {
        self.v *= k;
        for x in self.d.iter_mut() {
            *x *= k;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic<S: Scalar>(x: S) -> S {
        x * x * x - x.scale(2.0) + S::from_f64(1.0)
    }

    #[test]
    fn dual_matches_analytic_derivative() {
        let x = Dual::<1>::new(1.5, [1.0]);
        let y = cubic(x);
        assert_eq!(y.v, cubic(1.5));
        assert!((y.d[0] - (3.0 * 1.5 * 1.5 - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn independent_directions_stay_separate() {
        let x = Dual::<2>::new(2.0, [1.0, 0.0]);
        let y = Dual::<2>::new(3.0, [0.0, 1.0]);
        let z = x * y - y;
        assert_eq!(z.v, 3.0);
        assert_eq!(z.d, [3.0, 1.0]);
    }
}
