//! Cut time by Maxwell-point search: another geodesic from the origin
//! reaching the same point at the same time.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use super::conjugate::conjugate_time;
use super::{angle_distance, wrap_angle, CausticError};
use crate::flow::{exp_jacobian, exp_map, IntegratorSettings};
use crate::model::FrameField;

const MAX_NEWTON: usize = 40;
/// Partners closer than this in `φ` are the geodesic itself.
const MIN_PARTNER_SEPARATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutEstimate {
    pub tau_cut: f64,
    pub tau_conj: f64,
    /// `(φ', r')` of the geodesic met at the cut time.
    pub partner: Option<(f64, f64)>,
    /// A Maxwell point was found; otherwise `tau_cut = tau_conj`.
    pub found: bool,
}

fn position(field: &FrameField, t: f64, phi: f64, r: f64, s: &IntegratorSettings) -> Result<Vector3<f64>, CausticError> {
    Ok(Vector3::from(exp_map(field, t, phi, r, s)?))
}

/// Newton on `E(t, φ', r') − E(t, φ, r) = 0` from one starting point.
fn maxwell_from(
    field: &FrameField,
    phi: f64,
    r: f64,
    start: (f64, f64, f64),
    tol: f64,
    s: &IntegratorSettings,
) -> Result<Option<(f64, f64, f64)>, CausticError> {
    let (mut t, mut p, mut q) = start;
    for _ in 0..MAX_NEWTON {
        let f = position(field, t, p, q, s)? - position(field, t, phi, r, s)?;
        if f.norm() <= tol {
            return Ok(Some((t, p, q)));
        }
        let jp = exp_jacobian(field, t, p, q, s)?;
        let j0 = exp_jacobian(field, t, phi, r, s)?;
        let m = Matrix3::from_columns(&[jp.column(0) - j0.column(0), jp.column(1).into(), jp.column(2).into()]);
        let Some(step) = m.lu().solve(&(-f)) else {
            return Ok(None);
        };
        // stay in the trust region around the conjugate time and height
        let inside = |l: f64| {
            let (tn, qn) = (t + l * step[0], q + l * step[2]);
            (tn - start.0).abs() <= 0.5 * start.0 && (qn - r).abs() <= 0.5 * r.abs()
        };
        let mut lambda = 1.0;
        while lambda > 1e-3 && !inside(lambda) {
            lambda *= 0.5;
        }
        if !inside(lambda) {
            return Ok(None);
        }
        t += lambda * step[0];
        p += lambda * step[1];
        q += lambda * step[2];
        if !(t.is_finite() && p.is_finite() && q.is_finite()) {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Earliest Maxwell time not after the first conjugate time. Starts are
/// spread over `φ' ∈ φ + π ± window`, `r' = r`, `t = τ_conj`.
pub fn cut_time_estimate(
    field: &FrameField,
    phi: f64,
    r: f64,
    window: f64,
    settings: &IntegratorSettings,
) -> Result<CutEstimate, CausticError> {
    if r == 0.0 || !r.is_finite() {
        return Err(CausticError::InvalidArgument("cut time needs r != 0".into()));
    }
    let tau_conj = conjugate_time(field, phi, r, settings)?;
    // the geodesics reach distances of order 1/r and heights of order 1/r²
    let scale = (1.0 / r.abs()).min(1.0 / (r * r));
    let tol = 1e-9 * scale;
    let mut best: Option<(f64, f64, f64)> = None;
    let starts = [0.0, -0.5, 0.5, -1.0, 1.0];
    for k in starts {
        let p0 = phi + PI + k * window;
        let found = match maxwell_from(field, phi, r, (tau_conj, p0, r), tol, settings) {
            Ok(f) => f,
            Err(CausticError::Flow(_)) => None,
            Err(e) => return Err(e),
        };
        if let Some((t, p, q)) = found {
            let distinct = angle_distance(p, phi) > MIN_PARTNER_SEPARATION
                || (q - r).abs() > MIN_PARTNER_SEPARATION * r.abs();
            if distinct && t > 0.0 && t <= tau_conj * (1.0 + 1e-9) && best.is_none_or(|b| t < b.0) {
                best = Some((t, wrap_angle(p), q));
            }
        }
    }
    Ok(match best {
        Some((t, p, q)) => CutEstimate { tau_cut: t.min(tau_conj), tau_conj, partner: Some((p, q)), found: true },
        None => CutEstimate { tau_cut: tau_conj, tau_conj, partner: None, found: false },
    })
}
