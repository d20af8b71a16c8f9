use std::f64::consts::TAU;

use num_complex::Complex64;

use super::invariants::ComplexPoly;
use super::ClassifierError;

/// Roots of a polynomial lying on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRoots {
    /// Arguments in `[0, 2π)`, ascending.
    pub angles: Vec<f64>,
    /// Two roots (anywhere in the plane) coincide to within the separation
    /// tolerance.
    pub multiple: bool,
}

pub const TOL_CIRCLE: f64 = 1e-8;
const TOL_SEPARATION: f64 = 1e-6;

/// All complex roots, by Aberth–Ehrlich iteration followed by Newton polishing.
pub fn all_roots(poly: &ComplexPoly) -> Result<Vec<Complex64>, ClassifierError> {
    let deg = poly.degree().ok_or(ClassifierError::ZeroPolynomial)?;
    let coeffs = &poly.0[..=deg];
    // roots at the origin
    let zeros = coeffs.iter().position(|c| c.norm() != 0.0).unwrap_or(0);
    let reduced = ComplexPoly(coeffs[zeros..].to_vec());
    let n = deg - zeros;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if n == 0 {
        return Ok(roots);
    }
    let lead = reduced.0[n];
    let monic = ComplexPoly(reduced.0.iter().map(|&c| c / lead).collect());
    let dp = monic.derivative();

    // Cauchy-type radius for the starting circle
    let radius = monic.0[..n].iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-3).min(1e3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / n as f64 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..500 {
        let mut biggest: f64 = 0.0;
        for i in 0..n {
            let p = monic.eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp.eval(z[i]);
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * sum);
            if !w.is_finite() {
                continue;
            }
            z[i] -= w;
            biggest = biggest.max(w.norm() / z[i].norm().max(1e-300));
        }
        if biggest < 1e-15 {
            converged = true;
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = dp.eval(*r);
            if d.norm() == 0.0 {
                break;
            }
            let step = monic.eval(*r) / d;
            if step.is_finite() {
                *r -= step;
            }
        }
    }
    let residual = z
        .iter()
        .map(|&r| monic.eval(r).norm() / (1.0 + r.norm()).powi(n as i32))
        .fold(0.0, f64::max);
    if !converged && residual > 1e-10 {
        return Err(ClassifierError::NumericalRootFailure);
    }
    roots.extend(z);
    Ok(roots)
}

/// Roots on the unit circle to within `tol_circle`, as sorted angles.
pub fn unit_roots(poly: &ComplexPoly, tol_circle: f64) -> Result<UnitRoots, ClassifierError> {
    let roots = all_roots(poly)?;
    let multiple = roots
        .iter()
        .enumerate()
        .any(|(i, a)| roots[i + 1..].iter().any(|b| (a - b).norm() < TOL_SEPARATION));
    let mut angles: Vec<f64> = roots
        .iter()
        .filter(|r| (r.norm() - 1.0).abs() <= tol_circle)
        .map(|r| {
            let a = r.arg().rem_euclid(TAU);
            if a >= TAU {
                0.0
            } else {
                a
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(UnitRoots { angles, multiple })
}

/// Zeros in `[0, 2π)` of `A cos 2φ + B sin 2φ + C cos 4φ + D sin 4φ`.
pub fn trig_zeros(a: f64, b: f64, c: f64, d: f64) -> Result<Vec<f64>, ClassifierError> {
    if a == 0.0 && b == 0.0 && c == 0.0 && d == 0.0 {
        return Err(ClassifierError::AllZero);
    }
    let f = |p: f64| a * (2.0 * p).cos() + b * (2.0 * p).sin() + c * (4.0 * p).cos() + d * (4.0 * p).sin();
    const N: usize = 4096;
    let grid: Vec<f64> = (0..=N).map(|k| TAU * k as f64 / N as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&p| f(p)).collect();
    let mut zeros = Vec::new();
    for k in 0..N {
        let (f0, f1) = (vals[k], vals[k + 1]);
        if f0 == 0.0 {
            zeros.push(grid[k]);
            continue;
        }
        if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (grid[k], grid[k + 1], f0);
            while hi - lo > 1e-15 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
                if mid == lo && mid == hi {
                    break;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
    }
    Ok(zeros)
}

/// A unit-circle root `z = e^{iθ}` of `P̃` is a zero of the trigonometric
/// polynomial at `φ = θ/2` and `φ = θ/2 + π`.
pub fn phi_from_theta(theta: f64) -> [f64; 2] {
    let a = (0.5 * theta).rem_euclid(TAU);
    [a, (a + std::f64::consts::PI).rem_euclid(TAU)]
}
