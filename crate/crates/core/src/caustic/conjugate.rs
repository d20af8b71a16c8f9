//! First conjugate time along a geodesic.

use std::f64::consts::PI;

use nalgebra::Matrix3;

use super::CausticError;
use crate::flow::{IntegratorSettings, JacobianStepper};
use crate::model::FrameField;

/// Scan window in units of the Heisenberg period `2π/|r|`.
const SCAN_START: f64 = 0.7;
const SCAN_END: f64 = 1.3;
const SCAN_EXPANDED_END: f64 = 2.0;
const REL_TOL: f64 = 1e-13;

/// Conjugate time together with the conjugate point and the Jacobian there.
#[derive(Debug, Clone, Copy)]
pub struct ConjugatePoint {
    pub tau: f64,
    pub position: [f64; 3],
    pub jacobian: Matrix3<f64>,
}

/// First `t > 0` where `det ∂(x,y,w)/∂(t,φ,r)` changes sign.
pub fn conjugate_point(
    field: &FrameField,
    phi: f64,
    r: f64,
    settings: &IntegratorSettings,
) -> Result<ConjugatePoint, CausticError> {
    if r == 0.0 || !r.is_finite() {
        return Err(CausticError::NoBracket { phi, r });
    }
    let period = 2.0 * PI / r.abs();
    let nominal = settings.step_size(r);
    let start = SCAN_START * period;
    let n0 = (start / nominal).ceil().max(1.0) as usize;
    let dt0 = start / n0 as f64;

    let mut stepper = JacobianStepper::new(field, phi, r);
    for _ in 0..n0 {
        stepper.advance(dt0)?;
    }
    let mut d_prev = stepper.jacobian().determinant();
    let dt = nominal;
    let mut end = SCAN_END * period;
    loop {
        if stepper.t >= end {
            if end < SCAN_EXPANDED_END * period {
                end = SCAN_EXPANDED_END * period;
            } else {
                return Err(CausticError::NoBracket { phi, r });
            }
        }
        let (_, j) = stepper.peek(dt);
        let d = j.determinant();
        if d == 0.0 || d.signum() != d_prev.signum() {
            return Ok(refine(&stepper, dt, d_prev, d));
        }
        stepper.advance(dt)?;
        d_prev = d;
    }
}

/// Illinois false position for the sign change of `det J` inside one step.
fn refine(stepper: &JacobianStepper, dt: f64, f_lo: f64, f_hi: f64) -> ConjugatePoint {
    let (mut a, mut b) = (0.0, dt);
    let (mut fa, mut fb) = (f_lo, f_hi);
    let tol = REL_TOL * (stepper.t + dt);
    let mut side = 0i8;
    let mut s = b;
    if fb != 0.0 {
        for _ in 0..200 {
            s = (a * fb - b * fa) / (fb - fa);
            if !(s > a && s < b) {
                s = 0.5 * (a + b);
            }
            let (_, j) = stepper.peek(s);
            let fs = j.determinant();
            if fs == 0.0 {
                break;
            }
            if fs.signum() == fb.signum() {
                b = s;
                fb = fs;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            } else {
                a = s;
                fa = fs;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            }
            if b - a <= tol {
                s = if fa.abs() < fb.abs() { a } else { b };
                break;
            }
        }
    }
    let (z, jacobian) = stepper.peek(s);
    ConjugatePoint {
        tau: stepper.t + s,
        position: [z[0].v, z[1].v, z[2].v],
        jacobian,
    }
}

pub fn conjugate_time(
    field: &FrameField,
    phi: f64,
    r: f64,
    settings: &IntegratorSettings,
) -> Result<f64, CausticError> {
    conjugate_point(field, phi, r, settings).map(|c| c.tau)
}
