use std::f64::consts::TAU;

use rayon::prelude::*;

use super::conjugate::conjugate_point;
use super::crossings::{find_crossings, Crossing};
use super::cusps::{find_cusps, CuspSettings};
use super::{CausticError, Side};
use crate::flow::IntegratorSettings;
use crate::model::{FrameField, NormalFormCoefficients};

const MAX_SECANT_ITERS: usize = 50;
const HEIGHT_REL_TOL: f64 = 1e-13;
const MAX_FAILURE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSettings {
    pub n_grid: usize,
    pub integrator: IntegratorSettings,
    pub cusp: CuspSettings,
    /// Crossing merge tolerance in grid spacings.
    pub merge_spacings: f64,
}

impl Default for SliceSettings {
    fn default() -> Self {
        Self {
            n_grid: 1024,
            integrator: IntegratorSettings::default(),
            cusp: CuspSettings::default(),
            merge_spacings: 3.0,
        }
    }
}

/// One conjugate point on the slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSample {
    pub phi: f64,
    pub x: f64,
    pub y: f64,
    /// Covector height that puts the conjugate point on the slice plane.
    pub r: f64,
    pub tau: f64,
}

/// Intersection of a semi-caustic with the plane `h = ±ε`, where
/// `h = sign(w)·√(|w|/π)`.
#[derive(Debug, Clone)]
pub struct CausticSlice {
    pub h: f64,
    pub side: Side,
    pub samples: Vec<SliceSample>,
    /// Raw cusp detection result; may have any count.
    pub cusp_angles: Vec<f64>,
    pub crossings: Vec<Crossing>,
    /// Grid points whose height solve failed and were dropped.
    pub failed: usize,
    /// The curve has shrunk to a point (no cusp or crossing structure).
    pub collapsed: bool,
}

impl CausticSlice {
    pub fn grid_spacing(&self) -> f64 {
        TAU / (self.samples.len() + self.failed) as f64
    }

    /// Largest `|(x, y)|` over the samples.
    pub fn extent(&self) -> f64 {
        self.samples.iter().map(|s| s.x.hypot(s.y)).fold(0.0, f64::max)
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        self.samples.iter().map(|s| [s.x, s.y]).collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.phi).collect()
    }

    /// `phi,x,y` CSV, one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phi,x,y\n");
        for s in &self.samples {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", s.phi, s.x, s.y));
        }
        out
    }
}

/// Solves for the covector height `r` whose conjugate point lies at
/// signed height `target`.
pub fn slice_point(
    field: &FrameField,
    phi: f64,
    target: f64,
    settings: &IntegratorSettings,
) -> Result<SliceSample, CausticError> {
    let eval = |u: f64| -> Result<(f64, SliceSample), CausticError> {
        let r = 1.0 / u;
        let c = conjugate_point(field, phi, r, settings)?;
        let w = c.position[2];
        let h = w.signum() * (w.abs() / std::f64::consts::PI).sqrt();
        let s = SliceSample { phi, x: c.position[0], y: c.position[1], r, tau: c.tau };
        Ok((h - target, s))
    };
    let tol = HEIGHT_REL_TOL * target.abs();
    let mut u0 = target;
    let (mut g0, s0) = eval(u0)?;
    if g0.abs() <= tol {
        return Ok(s0);
    }
    let mut u1 = u0 - g0;
    for _ in 0..MAX_SECANT_ITERS {
        let (g1, s1) = eval(u1)?;
        if g1.abs() <= tol {
            return Ok(s1);
        }
        if g1 == g0 {
            break;
        }
        let u2 = u1 - g1 * (u1 - u0) / (g1 - g0);
        (u0, g0) = (u1, g1);
        u1 = u2;
        if !u1.is_finite() || u1 == 0.0 {
            break;
        }
    }
    Err(CausticError::SolveFailure { phi })
}

pub fn slice(
    coeffs: &NormalFormCoefficients,
    h: f64,
    side: Side,
    n_grid: usize,
) -> Result<CausticSlice, CausticError> {
    let field = FrameField::new(coeffs)
        .map_err(|e| CausticError::InvalidArgument(e.to_string()))?;
    slice_with(&field, h, side, &SliceSettings { n_grid, ..Default::default() })
}

pub fn slice_with(
    field: &FrameField,
    h: f64,
    side: Side,
    settings: &SliceSettings,
) -> Result<CausticSlice, CausticError> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(CausticError::InvalidArgument(format!("slice height must be positive, got {h}")));
    }
    if settings.n_grid < 512 {
        return Err(CausticError::InvalidArgument(format!(
            "n_grid must be at least 512, got {}",
            settings.n_grid
        )));
    }
    let n = settings.n_grid;
    let target = side.sign() * h;
    let solved: Vec<Result<SliceSample, CausticError>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let phi = TAU * i as f64 / n as f64;
            slice_point(field, phi, target, &settings.integrator)
        })
        .collect();
    let mut samples = Vec::with_capacity(n);
    let mut failed = 0;
    for s in solved {
        match s {
            Ok(s) => samples.push(s),
            Err(CausticError::SolveFailure { .. } | CausticError::NoBracket { .. }) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    if failed as f64 > MAX_FAILURE_FRACTION * n as f64 {
        return Err(CausticError::TooManyFailures { failed, total: n });
    }
    let mut slice = CausticSlice {
        h,
        side,
        samples,
        cusp_angles: Vec::new(),
        crossings: Vec::new(),
        failed,
        collapsed: false,
    };
    // features live at scale h⁴ or larger; below this the curve is a point
    slice.collapsed = slice.extent() <= 1e-6 * h.powi(4);
    if !slice.collapsed {
        let pts = slice.points();
        let phis = slice.angles();
        slice.cusp_angles = find_cusps(&phis, &pts, &settings.cusp);
        slice.crossings =
            find_crossings(&phis, &pts, settings.merge_spacings * slice.grid_spacing());
    }
    Ok(slice)
}
