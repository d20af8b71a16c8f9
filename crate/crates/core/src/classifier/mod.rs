//! Closed-form invariants of the normal-form coefficients and the regime
//! they predict, without any integration.

mod invariants;
mod resultant;
mod roots;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::caustic::{angle_distance, wrap_angle, NamedSymbol};
use crate::model::NormalFormCoefficients;

pub use invariants::{abcd, b_polar, build_polynomials, p_tilde, t_tilde, Abcd, ComplexPoly, Polynomials};
pub use resultant::{normalized_resultant, resultant};
pub use roots::{all_roots, phi_from_theta, trig_zeros, unit_roots, UnitRoots, TOL_CIRCLE};

pub const TOL_C: f64 = 1e-12;
pub const TOL_RES: f64 = 1e-8;
/// Two unit roots closer than this (in angle) count as shared.
pub const TOL_ANGLE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifierError {
    #[error("polynomial vanishes identically")]
    ZeroPolynomial,
    #[error("root iteration did not converge")]
    NumericalRootFailure,
    #[error("trigonometric polynomial vanishes identically")]
    AllZero,
    #[error("resultant needs non-vanishing leading coefficients")]
    DegenerateLeadingCoefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    OffC,
    OnCGeneric,
    OnCDegeneratePlus,
    OnCDegenerateMinus,
    /// Both sides degenerate at once.
    NonGeneric,
    /// On the curve with `b = 0`: the cubic `T̃` vanishes.
    DegenerateB,
}

fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn ser_opt_complex<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
    z.map(|z| [z.re, z.im]).serialize(s)
}

/// Position of the adherent angles relative to the predicted cusps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Arrangement {
    /// Zeros of `P±(φ)` in `[0, 2π)`.
    pub phi_zeros: Vec<f64>,
    /// Number of zeros on each arc between consecutive cusp angles, arcs
    /// starting at the smallest cusp angle.
    pub arc_counts: [usize; 6],
    /// Sign of `P±` at each cusp angle.
    pub cusp_signs: [i8; 6],
    /// Smallest angular distance from a zero to a cusp angle.
    pub min_cusp_distance: f64,
}

#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct ClassifierReport {
    pub b_tilde: f64,
    pub omega_b: f64,
    pub A_plus: f64,
    pub A_minus: f64,
    pub B_plus: f64,
    pub B_minus: f64,
    pub C: f64,
    pub D: f64,
    #[serde(serialize_with = "ser_complex")]
    pub mu: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub nu_plus: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub nu_minus: Complex64,
    /// Unit-circle roots of `P̃±` as angles `θ`; `z = e^{iθ}` with `θ = 2φ`.
    pub unit_roots_plus: Vec<f64>,
    pub unit_roots_minus: Vec<f64>,
    pub t_roots: Vec<f64>,
    /// `None` when a leading coefficient vanishes.
    #[serde(serialize_with = "ser_opt_complex")]
    pub res_plus: Option<Complex64>,
    #[serde(serialize_with = "ser_opt_complex")]
    pub res_minus: Option<Complex64>,
    /// `|Res| / (‖P̃‖³ ‖T̃‖⁴)`.
    pub res_plus_normalized: Option<f64>,
    pub res_minus_normalized: Option<f64>,
    pub degenerate_plus: bool,
    pub degenerate_minus: bool,
    pub regime: Regime,
    pub predicted_family_plus: Vec<NamedSymbol>,
    pub predicted_family_minus: Vec<NamedSymbol>,
    /// Predicted cusp angles `φ` of the slice: zeros of `sin(3φ + ω_b)`.
    pub cusp_angles: Vec<f64>,
    pub arrangement_plus: Option<Arrangement>,
    pub arrangement_minus: Option<Arrangement>,
    /// Refinement of each family to one symbol by the calibrated table.
    pub predicted_symbol_plus: Option<NamedSymbol>,
    pub predicted_symbol_minus: Option<NamedSymbol>,
}

impl ClassifierReport {
    pub fn family(&self, sign: f64) -> &[NamedSymbol] {
        if sign >= 0.0 {
            &self.predicted_family_plus
        } else {
            &self.predicted_family_minus
        }
    }

    pub fn unit_roots(&self, sign: f64) -> &[f64] {
        if sign >= 0.0 {
            &self.unit_roots_plus
        } else {
            &self.unit_roots_minus
        }
    }

    pub fn abcd(&self) -> Abcd {
        Abcd {
            a_plus: self.A_plus,
            a_minus: self.A_minus,
            b_plus: self.B_plus,
            b_minus: self.B_minus,
            c: self.C,
            d: self.D,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Zeros of `sin(3φ + ω)` in `[0, 2π)`, ascending.
pub fn cusp_angles(omega_b: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..6).map(|k| wrap_angle((k as f64 * PI - omega_b) / 3.0)).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Smallest angular distance between any root of one set and any of the other.
pub fn min_root_separation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| angle_distance(x, y)))
        .fold(f64::INFINITY, f64::min)
}

fn arrangement(k: &Abcd, sign: f64, cusps: &[f64]) -> Result<Arrangement, ClassifierError> {
    let (a, b) = k.side(sign);
    let phi_zeros = trig_zeros(a, b, k.c, k.d)?;
    let mut arc_counts = [0usize; 6];
    for &z in &phi_zeros {
        let idx = cusps.iter().rposition(|&c| c <= z).unwrap_or(5);
        arc_counts[idx] += 1;
    }
    let mut cusp_signs = [0i8; 6];
    for (s, &c) in cusp_signs.iter_mut().zip(cusps) {
        let v = k.eval(sign, c);
        *s = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
    }
    Ok(Arrangement {
        min_cusp_distance: min_root_separation(&phi_zeros, cusps),
        phi_zeros,
        arc_counts,
        cusp_signs,
    })
}

struct SideResult {
    roots: UnitRoots,
    res: Option<Complex64>,
    res_normalized: Option<f64>,
    degenerate: bool,
}

fn side(p: &ComplexPoly, t: &ComplexPoly, t_roots: &[f64]) -> Result<SideResult, ClassifierError> {
    let roots = unit_roots(p, TOL_CIRCLE)?;
    let (res, res_normalized) = match resultant(p, t) {
        Ok(r) => (Some(r), Some(normalized_resultant(p, t)?)),
        Err(ClassifierError::DegenerateLeadingCoefficient) => (None, None),
        Err(e) => return Err(e),
    };
    let degenerate = match res_normalized {
        Some(r) => r <= TOL_RES,
        // dropped degree: compare the unit roots directly
        None => min_root_separation(&roots.angles, t_roots) <= TOL_ANGLE,
    };
    Ok(SideResult { roots, res, res_normalized, degenerate })
}

fn family(on_c: bool, s: &SideResult) -> Vec<NamedSymbol> {
    if !on_c {
        return Vec::new();
    }
    if s.degenerate {
        return NamedSymbol::DEGENERATE.to_vec();
    }
    match s.roots.angles.len() {
        2 => vec![NamedSymbol::S1],
        4 => vec![NamedSymbol::S2, NamedSymbol::S3],
        _ => Vec::new(),
    }
}

/// Refines a generic family to a single symbol from the arrangement of the
/// adherent angles. Calibrated against the numerical slices; `None` where
/// the table has no entry.
pub fn refine_symbol(family: &[NamedSymbol], arr: &Arrangement) -> Option<NamedSymbol> {
    match family {
        [one] => Some(*one),
        [NamedSymbol::S2, NamedSymbol::S3] => {
            // P has 8 zeros (four pairs φ, φ+π); the pairs fall on three edges
            // of the deltoid or only two
            let edges = (0..3).filter(|&e| arr.arc_counts[e] + arr.arc_counts[e + 3] > 0).count();
            match edges {
                3 => Some(NamedSymbol::S2),
                2 => Some(NamedSymbol::S3),
                _ => None,
            }
        }
        _ => None,
    }
}

pub fn classify(coeffs: &NormalFormCoefficients) -> Result<ClassifierReport, ClassifierError> {
    let k = abcd(coeffs);
    let (b_tilde, omega_b) = b_polar(coeffs.c31, coeffs.c32);
    let polys = build_polynomials(&k, coeffs.c31, coeffs.c32);
    let on_c = coeffs.on_degenerate_curve(TOL_C);
    let b_zero = b_tilde == 0.0;

    let t_roots = if b_zero { Vec::new() } else { unit_roots(&polys.t, TOL_CIRCLE)?.angles };
    let empty = || SideResult {
        roots: UnitRoots { angles: Vec::new(), multiple: false },
        res: None,
        res_normalized: None,
        degenerate: false,
    };
    let (plus, minus) = if b_zero {
        let roots = |p: &ComplexPoly| -> Result<SideResult, ClassifierError> {
            match unit_roots(p, TOL_CIRCLE) {
                Ok(roots) => Ok(SideResult { roots, ..empty() }),
                Err(ClassifierError::ZeroPolynomial) => Ok(empty()),
                Err(e) => Err(e),
            }
        };
        (roots(&polys.p_plus)?, roots(&polys.p_minus)?)
    } else {
        let one = |p: &ComplexPoly| match side(p, &polys.t, &t_roots) {
            Err(ClassifierError::ZeroPolynomial) => Ok(empty()),
            r => r,
        };
        (one(&polys.p_plus)?, one(&polys.p_minus)?)
    };

    let regime = if !on_c {
        Regime::OffC
    } else if b_zero {
        Regime::DegenerateB
    } else {
        match (plus.degenerate, minus.degenerate) {
            (false, false) => Regime::OnCGeneric,
            (true, false) => Regime::OnCDegeneratePlus,
            (false, true) => Regime::OnCDegenerateMinus,
            (true, true) => Regime::NonGeneric,
        }
    };
    let classified = on_c && !b_zero;
    let fam_plus = family(classified, &plus);
    let fam_minus = family(classified, &minus);

    let cusps = if b_zero { Vec::new() } else { cusp_angles(omega_b) };
    let arr = |sign: f64| -> Result<Option<Arrangement>, ClassifierError> {
        if !classified {
            return Ok(None);
        }
        match arrangement(&k, sign, &cusps) {
            Ok(a) => Ok(Some(a)),
            Err(ClassifierError::AllZero) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let arrangement_plus = arr(1.0)?;
    let arrangement_minus = arr(-1.0)?;
    let predicted_symbol_plus = arrangement_plus.as_ref().and_then(|a| refine_symbol(&fam_plus, a));
    let predicted_symbol_minus = arrangement_minus.as_ref().and_then(|a| refine_symbol(&fam_minus, a));

    Ok(ClassifierReport {
        b_tilde,
        omega_b,
        A_plus: k.a_plus,
        A_minus: k.a_minus,
        B_plus: k.b_plus,
        B_minus: k.b_minus,
        C: k.c,
        D: k.d,
        mu: polys.mu,
        nu_plus: polys.nu_plus,
        nu_minus: polys.nu_minus,
        unit_roots_plus: plus.roots.angles,
        unit_roots_minus: minus.roots.angles,
        t_roots,
        res_plus: plus.res,
        res_minus: minus.res,
        res_plus_normalized: plus.res_normalized,
        res_minus_normalized: minus.res_normalized,
        degenerate_plus: plus.degenerate,
        degenerate_minus: minus.degenerate,
        regime,
        predicted_family_plus: fam_plus,
        predicted_family_minus: fam_minus,
        cusp_angles: cusps,
        arrangement_plus,
        arrangement_minus,
        predicted_symbol_plus,
        predicted_symbol_minus,
    })
}

/// The SO(2) action on the classifying coefficients: `b ↦ b e^{3iα}`,
/// `μ ↦ μ e^{4iα}`, `ν± ↦ ν± e^{2iα}`. Other coefficients are unchanged.
pub fn rotate_coefficients(c: &NormalFormCoefficients, alpha: f64) -> NormalFormCoefficients {
    let rot = |z: Complex64, k: f64| z * Complex64::from_polar(1.0, k * alpha);
    let b = rot(Complex64::new(c.c31, c.c32), 3.0);
    // μ ∝ c443 + i c442
    let mu = rot(Complex64::new(c.c443, c.c442), 4.0);
    // ν± = ½[(35/8 ± 3πi) w + 45 s] with w = (c422 − c421) − i c423, s = c445 − i c444
    let w = rot(Complex64::new(c.c422 - c.c421, -c.c423), 2.0);
    let s = rot(Complex64::new(c.c445, -c.c444), 2.0);
    let sum = c.c421 + c.c422;
    NormalFormCoefficients {
        c31: b.re,
        c32: b.im,
        c443: mu.re,
        c442: mu.im,
        c421: 0.5 * (sum - w.re),
        c422: 0.5 * (sum + w.re),
        c423: -w.im,
        c445: s.re,
        c444: -s.im,
        ..c.clone()
    }
}

/// Coefficients whose `P̃±` shares the unit root `e^{iθ}` of `T̃` on one side.
/// Solves for `(c421 − c422, c423, c444, c445)` given `μ` and a free real `s`.
pub fn with_shared_root(
    base: &NormalFormCoefficients,
    plus: bool,
    root_index: usize,
    s: f64,
) -> Option<NormalFormCoefficients> {
    let b = Complex64::new(base.c31, base.c32);
    if b.norm() == 0.0 {
        return None;
    }
    let theta = unit_roots(&t_tilde(b), TOL_CIRCLE).ok()?.angles.get(root_index).copied()?;
    let z0 = Complex64::from_polar(1.0, theta);
    let k = abcd(base);
    let mu = Complex64::new(k.c, -k.d) * 0.5;
    // P̃(z0) = z0²·2Re(μ z0² + ν z0) = 0
    let nu = (Complex64::new(-(mu * z0 * z0).re, s)) * z0.conj();
    // keep the opposite side's ν: solve the linear map for (w, s45)
    let sign = if plus { 1.0 } else { -1.0 };
    let other = Complex64::new(if plus { k.a_minus } else { k.a_plus }, -(if plus { k.b_minus } else { k.b_plus })) * 0.5;
    // 2ν± = (K ± 3πi) w + 45 s45
    let kk = 35.0 / 8.0;
    let lhs_this = Complex64::new(kk, sign * 3.0 * PI);
    let lhs_other = Complex64::new(kk, -sign * 3.0 * PI);
    // (lhs_this − lhs_other) w = 2(ν − other)
    let w = (nu - other) * 2.0 / (lhs_this - lhs_other);
    let s45 = (nu * 2.0 - lhs_this * w) / 45.0;
    let sum = base.c421 + base.c422;
    Some(NormalFormCoefficients {
        c421: 0.5 * (sum - w.re),
        c422: 0.5 * (sum + w.re),
        c423: -w.im,
        c445: s45.re,
        c444: -s45.im,
        ..base.clone()
    })
}
