use std::f64::consts::{FRAC_PI_2, TAU};

use super::slice::CausticSlice;
use super::{wrap_angle, CausticError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspSettings {
    /// Speed must drop below this fraction of the median speed.
    pub theta_speed: f64,
    /// Minimum turn of the tangent across the candidate.
    pub reversal_angle: f64,
    /// Passages closer than this many grid spacings to a cusp are ambiguous.
    pub tol_cusp_spacings: f64,
}

impl Default for CuspSettings {
    fn default() -> Self {
        Self { theta_speed: 0.05, reversal_angle: FRAC_PI_2, tol_cusp_spacings: 2.0 }
    }
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Cusps of a closed sampled curve, as sorted parameter angles.
pub(crate) fn find_cusps(phis: &[f64], pts: &[[f64; 2]], settings: &CuspSettings) -> Vec<f64> {
    let n = pts.len();
    if n < 8 {
        return Vec::new();
    }
    let at = |i: isize| pts[i.rem_euclid(n as isize) as usize];
    // parameter gap between samples i and j (j after i), modulo the period
    let gap = |i: isize, j: isize| {
        let a = phis[i.rem_euclid(n as isize) as usize];
        let b = phis[j.rem_euclid(n as isize) as usize];
        let d = (b - a).rem_euclid(TAU);
        if d == 0.0 {
            TAU
        } else {
            d
        }
    };
    let deriv = |i: isize| -> [f64; 2] {
        let d = sub(at(i + 1), at(i - 1));
        let g = gap(i - 1, i + 1);
        [d[0] / g, d[1] / g]
    };
    let speed: Vec<f64> = (0..n as isize).map(|i| norm(deriv(i))).collect();
    let threshold = settings.theta_speed * median(speed.clone());
    let cos_rev = settings.reversal_angle.cos();

    let mut cusps = Vec::new();
    for i in 0..n as isize {
        let s = speed[i as usize];
        let prev = speed[(i - 1).rem_euclid(n as isize) as usize];
        let next = speed[(i + 1).rem_euclid(n as isize) as usize];
        if !(s < threshold && s <= prev && s < next) {
            continue;
        }
        let before = sub(at(i - 1), at(i - 3));
        let after = sub(at(i + 3), at(i + 1));
        let (nb, na) = (norm(before), norm(after));
        if nb == 0.0 || na == 0.0 {
            continue;
        }
        let cos_turn = (before[0] * after[0] + before[1] * after[1]) / (nb * na);
        if cos_turn > cos_rev {
            continue;
        }
        // the derivative changes sign along the post-cusp tangent direction
        let e = [after[0] / na - before[0] / nb, after[1] / na - before[1] / nb];
        let g = |j: isize| {
            let d = deriv(j);
            d[0] * e[0] + d[1] * e[1]
        };
        let mut phi = phis[i as usize];
        for j in (i - 2)..=(i + 1) {
            let (g0, g1) = (g(j), g(j + 1));
            if g0 <= 0.0 && g1 > 0.0 {
                let frac = if g1 - g0 > 0.0 { -g0 / (g1 - g0) } else { 0.5 };
                phi = phis[j.rem_euclid(n as isize) as usize] + frac * gap(j, j + 1);
                break;
            }
        }
        cusps.push(wrap_angle(phi));
    }
    cusps.sort_by(f64::total_cmp);
    cusps
}

/// Cusp angles of a slice; the count must be 4 or 6.
pub fn detect_cusps(slice: &CausticSlice) -> Result<Vec<f64>, CausticError> {
    match slice.cusp_angles.len() {
        4 | 6 => Ok(slice.cusp_angles.clone()),
        k => Err(CausticError::CuspCountUnexpected(k)),
    }
}
