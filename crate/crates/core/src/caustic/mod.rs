//! Conjugate locus: conjugate times, horizontal slices at `h = ±ε`, cusps,
//! self-intersections and the six-entry symbols built from them.

mod conjugate;
mod crossings;
mod cusps;
mod cut;
mod slice;
mod symbol;

use thiserror::Error;

use crate::flow::FlowError;

pub use conjugate::{conjugate_point, conjugate_time, ConjugatePoint};
pub use crossings::{detect_self_intersections, Crossing};
pub use cusps::{detect_cusps, CuspSettings};
pub use cut::{cut_time_estimate, CutEstimate};
pub use slice::{slice, slice_point, slice_with, CausticSlice, SliceSample, SliceSettings};
pub use symbol::{canonical_symbol, extract_symbol, NamedSymbol, Symbol};

/// Upper (`w > 0`, `r > 0`) or lower (`w < 0`, `r < 0`) semi-caustic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CausticError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("no sign change of the exponential Jacobian for phi = {phi}, r = {r}")]
    NoBracket { phi: f64, r: f64 },
    #[error("height solve did not converge at phi = {phi}")]
    SolveFailure { phi: f64 },
    #[error("{failed} of {total} grid points failed to solve")]
    TooManyFailures { failed: usize, total: usize },
    #[error("found {0} cusps, expected 4 or 6")]
    CuspCountUnexpected(usize),
    #[error("crossing passage at phi = {phi} lies within tolerance of a cusp")]
    PassageOnCusp { phi: f64 },
    #[error("symbol extraction needs 6 cusps, slice has {0}")]
    NotSixCusps(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let r = a.rem_euclid(t);
    if r >= t {
        0.0
    } else {
        r
    }
}

/// Shortest distance between two angles.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(std::f64::consts::TAU - d)
}
