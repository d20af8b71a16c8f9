//! Suspension coefficients `f_l(φ)` of the slices, recovered by fitting the
//! slice points against powers of `h`, and the identities tying them to the
//! classifier invariants.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;
use thiserror::Error;

use crate::caustic::{angle_distance, slice_point, CausticError, CausticSlice, Side};
use crate::classifier::{trig_zeros, ClassifierReport, TOL_ANGLE};
use crate::flow::IntegratorSettings;
use crate::model::{FrameField, NormalFormCoefficients};

pub const DEFAULT_H_LIST: [f64; 7] = [0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04];
pub const DEFAULT_DEGREE: usize = 7;
pub const DEFAULT_FIT_GRID: usize = 64;
const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {need} distinct heights for degree {degree}, got {got}")]
    TooFewHeights { need: usize, got: usize, degree: usize },
    #[error("height system is ill-conditioned (condition {0:e})")]
    IllConditioned(f64),
    #[error("b vanishes: the wedge factorization carries no information")]
    DegenerateB,
    #[error("fits are on different grids or of degree below 5")]
    Mismatch,
    #[error(transparent)]
    Caustic(#[from] CausticError),
}

/// Series `Σ hˡ f_l(φ)` for one side. Heights are signed (`h < 0` on the
/// lower side) and lower-side points are taken in the frame rotated by π; in
/// this convention `f₃` and `f₄` coincide across sides.
#[derive(Debug, Clone, Serialize)]
pub struct SuspensionFit {
    pub side: Side,
    pub degree: usize,
    pub phis: Vec<f64>,
    /// Signed heights used in the fit.
    pub h_list: Vec<f64>,
    /// `coefficients[l - 3][i]` is `f_l(φ_i)`.
    pub coefficients: Vec<Vec<[f64; 2]>>,
    /// Largest distance between a slice point and the fitted series.
    pub residual: f64,
    /// Bound on the error of each `f_l` induced by point errors of size
    /// `residual`.
    pub coefficient_tolerance: Vec<f64>,
    pub condition: f64,
}

impl SuspensionFit {
    pub fn f(&self, l: usize) -> &[[f64; 2]] {
        &self.coefficients[l - 3]
    }

    /// `Σ hˡ f_l(φ_i)` at a signed height, in the fit frame.
    pub fn eval(&self, i: usize, h: f64) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (k, f) in self.coefficients.iter().enumerate() {
            let p = h.powi(k as i32 + 3);
            out[0] += p * f[i][0];
            out[1] += p * f[i][1];
        }
        out
    }
}

/// Uniform grid of `n` angles starting at 0.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// Moves a slice point into the fit frame of its side.
pub fn to_fit_frame(side: Side, p: [f64; 2]) -> [f64; 2] {
    match side {
        Side::Plus => p,
        Side::Minus => [-p[0], -p[1]],
    }
}

/// Slice points for every `(h, φ)` in the fit frame; `out[j][i]` at
/// `h_list[j]` (unsigned).
pub fn slice_points(
    field: &FrameField,
    side: Side,
    h_list: &[f64],
    phis: &[f64],
    integrator: &IntegratorSettings,
) -> Result<Vec<Vec<[f64; 2]>>, CausticError> {
    h_list
        .iter()
        .map(|&h| {
            phis.par_iter()
                .map(|&phi| {
                    slice_point(field, phi, side.sign() * h, integrator)
                        .map(|s| to_fit_frame(side, [s.x, s.y]))
                })
                .collect()
        })
        .collect()
}

/// Least-squares fit of slice points against `h³ … hᵏ`, independently per φ.
pub fn fit_suspension(
    coeffs: &NormalFormCoefficients,
    side: Side,
    h_list: &[f64],
    phis: &[f64],
    k: usize,
) -> Result<SuspensionFit, FitError> {
    let field = FrameField::new(coeffs)
        .map_err(|e| CausticError::InvalidArgument(e.to_string()))?;
    fit_with(&field, side, h_list, phis, k, &IntegratorSettings::default())
}

pub fn fit_with(
    field: &FrameField,
    side: Side,
    h_list: &[f64],
    phis: &[f64],
    k: usize,
    integrator: &IntegratorSettings,
) -> Result<SuspensionFit, FitError> {
    let signed: Vec<f64> = h_list.iter().map(|h| side.sign() * h.abs()).collect();
    let design = Design::new(&signed, k)?;
    let points = slice_points(field, side, h_list, phis, integrator)?;
    Ok(design.fit(side, phis, &points))
}

/// Column-scaled Vandermonde system in `h`.
pub struct Design {
    h_list: Vec<f64>,
    degree: usize,
    pinv: DMatrix<f64>,
    condition: f64,
}

impl Design {
    pub fn new(h_list: &[f64], k: usize) -> Result<Self, FitError> {
        let mut distinct = h_list.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        let cols = k.saturating_sub(2);
        if k < 3 || distinct.len() < cols {
            return Err(FitError::TooFewHeights { need: cols.max(1), got: distinct.len(), degree: k });
        }
        let m = h_list.len();
        let mut v = DMatrix::from_fn(m, cols, |i, l| h_list[i].powi(l as i32 + 3));
        let scales: Vec<f64> = (0..cols).map(|l| v.column(l).norm()).collect();
        for (l, s) in scales.iter().enumerate() {
            v.column_mut(l).unscale_mut(*s);
        }
        let svd = v.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if condition > MAX_CONDITION {
            return Err(FitError::IllConditioned(condition));
        }
        let mut pinv = svd.pseudo_inverse(0.0).map_err(|_| FitError::IllConditioned(condition))?;
        for (l, s) in scales.iter().enumerate() {
            pinv.row_mut(l).unscale_mut(*s);
        }
        Ok(Self { h_list: h_list.to_vec(), degree: k, pinv, condition })
    }

    /// `points[j][i]` is the slice point at `h_list[j]`, `phis[i]`.
    pub fn fit(&self, side: Side, phis: &[f64], points: &[Vec<[f64; 2]>]) -> SuspensionFit {
        let cols = self.degree - 2;
        let mut coefficients = vec![vec![[0.0; 2]; phis.len()]; cols];
        let mut residual: f64 = 0.0;
        for i in 0..phis.len() {
            for c in 0..2 {
                let rhs = DVector::from_iterator(self.h_list.len(), points.iter().map(|p| p[i][c]));
                let sol = &self.pinv * &rhs;
                for l in 0..cols {
                    coefficients[l][i][c] = sol[l];
                }
            }
            for (j, &h) in self.h_list.iter().enumerate() {
                let mut fit = [0.0; 2];
                for l in 0..cols {
                    let p = h.powi(l as i32 + 3);
                    fit[0] += p * coefficients[l][i][0];
                    fit[1] += p * coefficients[l][i][1];
                }
                residual = residual.max((fit[0] - points[j][i][0]).hypot(fit[1] - points[j][i][1]));
            }
        }
        let coefficient_tolerance = (0..cols)
            .map(|l| residual * self.pinv.row(l).iter().map(|v| v.abs()).sum::<f64>())
            .collect();
        SuspensionFit {
            side,
            degree: self.degree,
            phis: phis.to_vec(),
            h_list: self.h_list.clone(),
            coefficients,
            residual,
            coefficient_tolerance,
            condition: self.condition,
        }
    }
}

/// Derivative of samples on a uniform periodic grid, by FFT.
pub fn spectral_derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let freq = if k < n / 2 {
            k as f64
        } else if k == n / 2 && n % 2 == 0 {
            0.0
        } else {
            k as f64 - n as f64
        };
        *c *= Complex64::new(0.0, freq);
    }
    inv.process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// `det(f₄′(φ), f₅(φ))` on the fit grid.
pub fn wedge(fit: &SuspensionFit) -> Vec<f64> {
    let f4 = fit.f(4);
    let dx = spectral_derivative(&f4.iter().map(|p| p[0]).collect::<Vec<_>>());
    let dy = spectral_derivative(&f4.iter().map(|p| p[1]).collect::<Vec<_>>());
    fit.f(5)
        .iter()
        .enumerate()
        .map(|(i, f5)| dx[i] * f5[1] - dy[i] * f5[0])
        .collect()
}

/// `−20π² b̃ sin(3φ + ω_b) P±(φ)`.
pub fn predicted_wedge(report: &ClassifierReport, sign: f64, phi: f64) -> f64 {
    -20.0 * PI * PI * report.b_tilde * (3.0 * phi + report.omega_b).sin() * report.abcd().eval(sign, phi)
}

/// Drops coincident pairs from a sorted zero list: a double zero does not
/// change sign, so sampling cannot see it.
pub fn sign_changing(zeros: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(zeros.len());
    let mut i = 0;
    while i < zeros.len() {
        if i + 1 < zeros.len() && angle_distance(zeros[i], zeros[i + 1]) <= tol {
            i += 2;
        } else {
            out.push(zeros[i]);
            i += 1;
        }
    }
    out
}

/// Sign changes of periodic samples, linearly interpolated.
pub fn sampled_zeros(phis: &[f64], values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let step = TAU / n as f64;
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (values[i], values[(i + 1) % n]);
        if a == 0.0 {
            out.push(phis[i]);
        } else if a * b < 0.0 {
            out.push(phis[i] + step * a / (a - b));
        }
    }
    out
}

fn max_set_distance(a: &[f64], b: &[f64]) -> f64 {
    let one_way = |a: &[f64], b: &[f64]| {
        a.iter()
            .map(|&x| b.iter().map(|&y| angle_distance(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[derive(Debug, Clone, Serialize)]
pub struct WedgeSide {
    pub side: Side,
    /// Max deviation relative to the larger of the two sides' maxima.
    pub residual: f64,
    pub zeros_fit: Vec<f64>,
    pub zeros_predicted: Vec<f64>,
    /// Hausdorff distance between the zero sets, in grid steps.
    pub zero_set_distance_steps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WedgeReport {
    pub residual: f64,
    pub plus: WedgeSide,
    pub minus: WedgeSide,
}

fn wedge_side(fit: &SuspensionFit, report: &ClassifierReport) -> Result<WedgeSide, FitError> {
    let sign = fit.side.sign();
    let got = wedge(fit);
    let want: Vec<f64> = fit.phis.iter().map(|&p| predicted_wedge(report, sign, p)).collect();
    let scale = got.iter().chain(&want).map(|v| v.abs()).fold(0.0, f64::max);
    let residual = got
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;
    let zeros_fit = sampled_zeros(&fit.phis, &got);
    let (a, b) = report.abcd().side(sign);
    let mut zeros_predicted = trig_zeros(a, b, report.C, report.D).unwrap_or_default();
    zeros_predicted.extend(report.cusp_angles.iter().copied());
    zeros_predicted.sort_by(f64::total_cmp);
    let zeros_predicted = sign_changing(&zeros_predicted, TOL_ANGLE);
    let step = TAU / fit.phis.len() as f64;
    Ok(WedgeSide {
        side: fit.side,
        residual,
        zero_set_distance_steps: max_set_distance(&zeros_fit, &zeros_predicted) / step,
        zeros_fit,
        zeros_predicted,
    })
}

pub fn wedge_residual(
    fit_plus: &SuspensionFit,
    fit_minus: &SuspensionFit,
    report: &ClassifierReport,
) -> Result<WedgeReport, FitError> {
    if report.b_tilde < 1e-12 {
        return Err(FitError::DegenerateB);
    }
    if fit_plus.degree < 5 || fit_minus.degree < 5 || fit_plus.phis != fit_minus.phis {
        return Err(FitError::Mismatch);
    }
    let plus = wedge_side(fit_plus, report)?;
    let minus = wedge_side(fit_minus, report)?;
    Ok(WedgeReport { residual: plus.residual.max(minus.residual), plus, minus })
}

#[derive(Debug, Clone, Serialize)]
pub struct AdherentEntry {
    pub phi_a: f64,
    pub phi_b: f64,
    /// Distance of each passage to the nearest zero of the wedge.
    pub distance_a: f64,
    pub distance_b: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct AdherentReport {
    pub entries: Vec<AdherentEntry>,
    pub all_matched: bool,
}

/// Checks that the crossing passages of a slice sit near zeros of the wedge
/// (the candidate adherent and cuspidal angles).
pub fn adherent_angle_check(fit: &SuspensionFit, slice: &CausticSlice, tol_angle: f64) -> AdherentReport {
    if slice.collapsed || slice.cusp_angles.len() != 6 {
        return AdherentReport { entries: Vec::new(), all_matched: true };
    }
    let zeros = sampled_zeros(&fit.phis, &wedge(fit));
    let nearest = |p: f64| zeros.iter().map(|&z| angle_distance(p, z)).fold(f64::INFINITY, f64::min);
    let entries: Vec<AdherentEntry> = slice
        .crossings
        .iter()
        .map(|c| {
            let (da, db) = (nearest(c.phi_a), nearest(c.phi_b));
            AdherentEntry { phi_a: c.phi_a, phi_b: c.phi_b, distance_a: da, distance_b: db, matched: da <= tol_angle && db <= tol_angle }
        })
        .collect();
    let all_matched = entries.iter().all(|e| e.matched);
    AdherentReport { entries, all_matched }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_derivative_of_trig_polynomial() {
        let phis = uniform_grid(64);
        let v: Vec<f64> = phis.iter().map(|p| (3.0 * p).sin() + 0.5 * (2.0 * p).cos()).collect();
        let d = spectral_derivative(&v);
        for (p, got) in phis.iter().zip(d) {
            let want = 3.0 * (3.0 * p).cos() - (2.0 * p).sin();
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_polynomial_data_is_recovered() {
        let h_list = DEFAULT_H_LIST;
        let phis = uniform_grid(8);
        let f = |l: usize, p: f64| [(l as f64 * p).cos(), l as f64 - p];
        let points: Vec<Vec<[f64; 2]>> = h_list
            .iter()
            .map(|&h| {
                phis.iter()
                    .map(|&p| {
                        let mut s = [0.0; 2];
                        for l in 3..=5 {
                            s[0] += h.powi(l as i32) * f(l, p)[0];
                            s[1] += h.powi(l as i32) * f(l, p)[1];
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let fit = Design::new(&h_list, 5).unwrap().fit(Side::Plus, &phis, &points);
        assert!(fit.residual < 1e-15);
        for l in 3..=5 {
            for (i, &p) in phis.iter().enumerate() {
                let want = f(l, p);
                assert!((fit.f(l)[i][0] - want[0]).abs() < 1e-6, "l={l}");
                assert!((fit.f(l)[i][1] - want[1]).abs() < 1e-6, "l={l}");
            }
        }
    }

    #[test]
    fn clustered_heights_are_ill_conditioned() {
        let h = [0.05, 0.05 + 1e-9, 0.05 + 2e-9, 0.05 + 3e-9];
        assert!(matches!(Design::new(&h, 5), Err(FitError::IllConditioned(_))));
        assert!(matches!(Design::new(&[0.03, 0.04], 5), Err(FitError::TooFewHeights { .. })));
    }

    #[test]
    fn double_zeros_are_dropped() {
        assert_eq!(sign_changing(&[0.1, 0.5, 0.5 + 1e-9, 2.0], 1e-6), vec![0.1, 2.0]);
        assert_eq!(sign_changing(&[0.1, 0.2], 1e-6), vec![0.1, 0.2]);
    }

    #[test]
    fn sampled_zeros_of_sine() {
        let phis = uniform_grid(100);
        let v: Vec<f64> = phis.iter().map(|p| (2.0 * p - 0.3).sin()).collect();
        let z = sampled_zeros(&phis, &v);
        assert_eq!(z.len(), 4);
        assert!(max_set_distance(&z, &[0.15, 0.15 + PI / 2.0, 0.15 + PI, 0.15 + 1.5 * PI]) < 1e-3);
    }
}
