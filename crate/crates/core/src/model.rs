//! Normal-form metric data and the orthonormal frame it defines.
//!
//! In normal coordinates `(x, y, w)` (weights 1, 1, 2) the frame reads
//!
//! ```text
//! X1 = (1 + y²β) ∂x − xyβ ∂y + (y/2)(1 + γ) ∂w
//! X2 = −xyβ ∂x + (1 + x²β) ∂y − (x/2)(1 + γ) ∂w
//! ```
//!
//! with `β(0,0,w) = γ(0,0,w) = ∂xγ(0,0,w) = ∂yγ(0,0,w) = 0`. The graded
//! pieces γ², γ³ and γ⁴ are stored through their SO(2)-adapted coefficients;
//! everything beyond graded order 4 and all of β are plain monomial lists.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Largest exponent accepted in any monomial.
pub const MAX_EXPONENT: u32 = 16;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("monomial entry [{0}] is not a non-negative integer exponent <= {MAX_EXPONENT}")]
    BadExponent(f64),
    #[error("beta monomial x^{i} y^{j} w^{k} violates beta(0,0,w) = 0 (needs i + j >= 1)")]
    BetaOnAxis { i: u32, j: u32, k: u32 },
    #[error("gamma_extra monomial x^{i} y^{j} w^{k} has graded order {order} < 5")]
    GammaLowOrder { i: u32, j: u32, k: u32, order: u32 },
    #[error("gamma_extra monomial x^{i} y^{j} w^{k} violates gamma = d_x gamma = d_y gamma = 0 on the w-axis (needs i + j >= 2)")]
    GammaOnAxis { i: u32, j: u32, k: u32 },
    #[error("non-finite coefficient {0}")]
    NonFinite(f64),
}

/// `coeff · x^i y^j w^k`, serialized as `[i, j, k, coeff]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
    pub k: u32,
    pub coeff: f64,
}

impl Monomial {
    pub const fn new(i: u32, j: u32, k: u32, coeff: f64) -> Self {
        Self { i, j, k, coeff }
    }

    /// Degree with respect to the gradation (1, 1, 2).
    pub fn graded_order(&self) -> u32 {
        self.i + self.j + 2 * self.k
    }
}

fn exponent(v: f64) -> Result<u32, ModelError> {
    if v.fract() == 0.0 && (0.0..=MAX_EXPONENT as f64).contains(&v) {
        Ok(v as u32)
    } else {
        Err(ModelError::BadExponent(v))
    }
}

impl TryFrom<[f64; 4]> for Monomial {
    type Error = ModelError;

    fn try_from(a: [f64; 4]) -> Result<Self, Self::Error> {
        if !a[3].is_finite() {
            return Err(ModelError::NonFinite(a[3]));
        }
        Ok(Self::new(exponent(a[0])?, exponent(a[1])?, exponent(a[2])?, a[3]))
    }
}

impl From<Monomial> for [f64; 4] {
    fn from(m: Monomial) -> Self {
        [m.i as f64, m.j as f64, m.k as f64, m.coeff]
    }
}

/// Taylor data of β and γ in normal coordinates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalFormCoefficients {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c11: f64,
    pub c12: f64,
    pub c31: f64,
    pub c32: f64,
    pub c421: f64,
    pub c422: f64,
    pub c423: f64,
    pub c441: f64,
    pub c442: f64,
    pub c443: f64,
    pub c444: f64,
    pub c445: f64,
    pub gamma_extra: Vec<Monomial>,
    pub beta_terms: Vec<Monomial>,
}

/// The truncation whose frame is the left-invariant Heisenberg frame.
pub fn heisenberg() -> NormalFormCoefficients {
    NormalFormCoefficients::default()
}

impl NormalFormCoefficients {
    pub fn validate(&self) -> Result<(), ModelError> {
        for v in self.named() {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(v));
            }
        }
        for m in &self.beta_terms {
            if m.i + m.j < 1 {
                return Err(ModelError::BetaOnAxis { i: m.i, j: m.j, k: m.k });
            }
        }
        for m in &self.gamma_extra {
            let order = m.graded_order();
            if order < 5 {
                return Err(ModelError::GammaLowOrder { i: m.i, j: m.j, k: m.k, order });
            }
            if m.i + m.j < 2 {
                return Err(ModelError::GammaOnAxis { i: m.i, j: m.j, k: m.k });
            }
        }
        Ok(())
    }

    fn named(&self) -> [f64; 15] {
        [
            self.c0, self.c1, self.c2, self.c11, self.c12, self.c31, self.c32, self.c421,
            self.c422, self.c423, self.c441, self.c442, self.c443, self.c444, self.c445,
        ]
    }

    /// On the degenerate curve `c0 = c2`, `c1 = 0`, within `tol`.
    pub fn on_degenerate_curve(&self, tol: f64) -> bool {
        (self.c0 - self.c2).abs() <= tol && self.c1.abs() <= tol
    }

    /// γ² + γ³ + γ⁴ expanded into monomials (zero terms kept, fixed order).
    pub fn graded_gamma_monomials(&self) -> Vec<Monomial> {
        let m = Monomial::new;
        vec![
            // γ²
            m(2, 0, 0, 2.0 * self.c0),
            m(0, 2, 0, 2.0 * self.c2),
            m(1, 1, 0, -2.0 * self.c1),
            // γ³
            m(3, 0, 0, self.c11 + self.c31),
            m(1, 2, 0, self.c11 - 3.0 * self.c31),
            m(2, 1, 0, self.c12 - 3.0 * self.c32),
            m(0, 3, 0, self.c12 + self.c32),
            // γ⁴, w-part
            m(2, 0, 1, self.c421),
            m(0, 2, 1, self.c422),
            m(1, 1, 1, -self.c423),
            // γ⁴, quartic part
            m(4, 0, 0, self.c441 + self.c442 + self.c444),
            m(0, 4, 0, self.c441 + self.c442 - self.c444),
            m(2, 2, 0, 2.0 * self.c441 - 6.0 * self.c442),
            m(3, 1, 0, 4.0 * self.c443 - 2.0 * self.c445),
            m(1, 3, 0, -4.0 * self.c443 - 2.0 * self.c445),
        ]
    }

    /// Inverse of [`Self::graded_gamma_monomials`]: reads the named
    /// coefficients back from the monomial coefficients of γ² + γ³ + γ⁴.
    pub fn from_graded_gamma(poly: &Poly3) -> Self {
        let a = |i, j, k| poly.coefficient(i, j, k);
        let (x3, xy2, x2y, y3) = (a(3, 0, 0), a(1, 2, 0), a(2, 1, 0), a(0, 3, 0));
        let c31 = (x3 - xy2) / 4.0;
        let c32 = (y3 - x2y) / 4.0;
        let (x4, y4, x2y2, x3y, xy3) = (a(4, 0, 0), a(0, 4, 0), a(2, 2, 0), a(3, 1, 0), a(1, 3, 0));
        let s = (x4 + y4) / 2.0;
        let c442 = (2.0 * s - x2y2) / 8.0;
        Self {
            c0: a(2, 0, 0) / 2.0,
            c2: a(0, 2, 0) / 2.0,
            c1: -a(1, 1, 0) / 2.0,
            c11: x3 - c31,
            c12: y3 - c32,
            c31,
            c32,
            c421: a(2, 0, 1),
            c422: a(0, 2, 1),
            c423: -a(1, 1, 1),
            c441: s - c442,
            c442,
            c443: (x3y - xy3) / 8.0,
            c444: (x4 - y4) / 2.0,
            c445: -(x3y + xy3) / 4.0,
            ..Self::default()
        }
    }

    /// Coefficients pulled back by the isometry `(x, y, w) ↦ (x, −y, −w)`:
    /// every monomial picks up `(−1)^(j+k)`. Geodesics correspond via
    /// `(φ, r) ↦ (−φ, −r)`, which swaps the two semi-caustics.
    pub fn reflected(&self) -> Self {
        let flip = |m: &Monomial| {
            let sign = if (m.j + m.k) % 2 == 0 { 1.0 } else { -1.0 };
            Monomial::new(m.i, m.j, m.k, sign * m.coeff)
        };
        let graded: Vec<Monomial> = self.graded_gamma_monomials().iter().map(flip).collect();
        Self {
            gamma_extra: self.gamma_extra.iter().map(flip).collect(),
            beta_terms: self.beta_terms.iter().map(flip).collect(),
            ..Self::from_graded_gamma(&Poly3::new(graded))
        }
    }

    pub fn gamma_poly(&self) -> Poly3 {
        let mut terms = self.graded_gamma_monomials();
        terms.extend(self.gamma_extra.iter().copied());
        Poly3::new(terms)
    }

    pub fn beta_poly(&self) -> Poly3 {
        Poly3::new(self.beta_terms.clone())
    }
}

/// Sparse polynomial in `(x, y, w)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly3 {
    terms: Vec<Monomial>,
    max_exp: usize,
}

impl Poly3 {
    /// Drops zero terms and merges duplicate exponents.
    pub fn new(terms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut merged: Vec<Monomial> = Vec::new();
        for t in terms {
            assert!(
                t.i <= MAX_EXPONENT && t.j <= MAX_EXPONENT && t.k <= MAX_EXPONENT,
                "exponent above {MAX_EXPONENT}"
            );
            match merged.iter_mut().find(|m| (m.i, m.j, m.k) == (t.i, t.j, t.k)) {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t),
            }
        }
        merged.retain(|m| m.coeff != 0.0);
        let max_exp = merged.iter().map(|m| m.i.max(m.j).max(m.k) as usize).max().unwrap_or(0);
        Self { terms: merged, max_exp }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, i: u32, j: u32, k: u32) -> f64 {
        self.terms
            .iter()
            .find(|m| (m.i, m.j, m.k) == (i, j, k))
            .map_or(0.0, |m| m.coeff)
    }

    /// Exact partial derivative; `var` is 0, 1, 2 for x, y, w.
    pub fn derivative(&self, var: usize) -> Poly3 {
        Poly3::new(self.terms.iter().filter_map(|m| {
            let e = [m.i, m.j, m.k][var];
            if e == 0 {
                return None;
            }
            let mut d = *m;
            d.coeff *= e as f64;
            match var {
                0 => d.i -= 1,
                1 => d.j -= 1,
                _ => d.k -= 1,
            }
            Some(d)
        }))
    }

    pub fn max_exponent(&self) -> usize {
        self.max_exp
    }

    pub fn eval<S: Scalar>(&self, x: S, y: S, w: S) -> S {
        if self.terms.is_empty() {
            return S::from_f64(0.0);
        }
        let p = Powers::new(x, y, w, self.max_exp);
        self.eval_powers(&p)
    }

    #[inline]
    fn eval_powers<S: Scalar>(&self, p: &Powers<S>) -> S {
        let mut acc = S::from_f64(0.0);
        for m in &self.terms {
            acc += (p.x[m.i as usize] * p.y[m.j as usize] * p.w[m.k as usize]).scale(m.coeff);
        }
        acc
    }
}

/// Powers `x^e, y^e, w^e` for `e ≤ max`, shared across several polynomials.
struct Powers<S> {
    x: [S; MAX_EXPONENT as usize + 1],
    y: [S; MAX_EXPONENT as usize + 1],
    w: [S; MAX_EXPONENT as usize + 1],
}

impl<S: Scalar> Powers<S> {
    #[inline]
    fn new(x: S, y: S, w: S, max: usize) -> Self {
        let one = S::from_f64(1.0);
        let mut p = Self {
            x: [one; MAX_EXPONENT as usize + 1],
            y: [one; MAX_EXPONENT as usize + 1],
            w: [one; MAX_EXPONENT as usize + 1],
        };
        for e in 1..=max {
            p.x[e] = p.x[e - 1] * x;
            p.y[e] = p.y[e - 1] * y;
            p.w[e] = p.w[e - 1] * w;
        }
        p
    }
}

/// Frame values at a point, components in `(∂x, ∂y, ∂w)` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePair {
    pub x1: [f64; 3],
    pub x2: [f64; 3],
}

/// β, γ and their first partials at one point.
#[derive(Debug, Clone, Copy)]
pub struct FrameJet<S> {
    pub beta: S,
    pub dbeta: [S; 3],
    pub gamma: S,
    pub dgamma: [S; 3],
}

/// Coefficients compiled into polynomials with their exact partials.
#[derive(Debug, Clone)]
pub struct FrameField {
    coeffs: NormalFormCoefficients,
    beta: Poly3,
    dbeta: [Poly3; 3],
    gamma: Poly3,
    dgamma: [Poly3; 3],
    max_exp: usize,
}

impl FrameField {
    pub fn new(coeffs: &NormalFormCoefficients) -> Result<Self, ModelError> {
        coeffs.validate()?;
        let beta = coeffs.beta_poly();
        let gamma = coeffs.gamma_poly();
        Ok(Self {
            max_exp: beta.max_exponent().max(gamma.max_exponent()),
            coeffs: coeffs.clone(),
            dbeta: [beta.derivative(0), beta.derivative(1), beta.derivative(2)],
            dgamma: [gamma.derivative(0), gamma.derivative(1), gamma.derivative(2)],
            beta,
            gamma,
        })
    }

    pub fn coefficients(&self) -> &NormalFormCoefficients {
        &self.coeffs
    }

    pub fn has_beta(&self) -> bool {
        !self.beta.is_zero()
    }

    pub fn is_heisenberg(&self) -> bool {
        self.beta.is_zero() && self.gamma.is_zero()
    }

    pub fn gamma(&self) -> &Poly3 {
        &self.gamma
    }

    pub fn beta(&self) -> &Poly3 {
        &self.beta
    }

    pub fn jet<S: Scalar>(&self, x: S, y: S, w: S) -> FrameJet<S> {
        let zero = S::from_f64(0.0);
        let p = Powers::new(x, y, w, self.max_exp);
        let (beta, dbeta) = if self.beta.is_zero() {
            (zero, [zero; 3])
        } else {
            (
                self.beta.eval_powers(&p),
                [
                    self.dbeta[0].eval_powers(&p),
                    self.dbeta[1].eval_powers(&p),
                    self.dbeta[2].eval_powers(&p),
                ],
            )
        };
        FrameJet {
            beta,
            dbeta,
            gamma: self.gamma.eval_powers(&p),
            dgamma: [
                self.dgamma[0].eval_powers(&p),
                self.dgamma[1].eval_powers(&p),
                self.dgamma[2].eval_powers(&p),
            ],
        }
    }

    pub fn frame(&self, pt: [f64; 3]) -> FramePair {
        let [x, y, w] = pt;
        let b = self.beta.eval(x, y, w);
        let g = self.gamma.eval(x, y, w);
        FramePair {
            x1: [1.0 + y * y * b, -x * y * b, 0.5 * y * (1.0 + g)],
            x2: [-x * y * b, 1.0 + x * x * b, -0.5 * x * (1.0 + g)],
        }
    }
}

pub fn eval_gamma(coeffs: &NormalFormCoefficients, pt: [f64; 3]) -> f64 {
    coeffs.gamma_poly().eval(pt[0], pt[1], pt[2])
}

pub fn eval_beta(coeffs: &NormalFormCoefficients, pt: [f64; 3]) -> f64 {
    coeffs.beta_poly().eval(pt[0], pt[1], pt[2])
}

/// Panics on coefficients that fail [`NormalFormCoefficients::validate`].
pub fn eval_frame(coeffs: &NormalFormCoefficients, pt: [f64; 3]) -> FramePair {
    FrameField::new(coeffs).expect("invalid normal-form coefficients").frame(pt)
}
