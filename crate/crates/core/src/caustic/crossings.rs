use serde::Serialize;

use super::slice::CausticSlice;
use super::{angle_distance, wrap_angle};

/// Transversal self-intersection of a closed curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    /// Parameter of the first passage, `phi_a < phi_b`.
    pub phi_a: f64,
    pub phi_b: f64,
    pub point: [f64; 2],
}

impl Crossing {
    pub fn passages(&self) -> [f64; 2] {
        [self.phi_a, self.phi_b]
    }
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// All crossings of the closed polyline through `pts`, merged when both
/// passages lie within `merge_tol` (parameter units) of an earlier one.
pub(crate) fn find_crossings(phis: &[f64], pts: &[[f64; 2]], merge_tol: f64) -> Vec<Crossing> {
    let n = pts.len();
    if n < 4 {
        return Vec::new();
    }
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    let param = |i: usize, s: f64| {
        let a = phis[i];
        let mut b = phis[(i + 1) % n];
        if b <= a {
            b += std::f64::consts::TAU;
        }
        wrap_angle(a + s * (b - a))
    };

    let mut order: Vec<(f64, f64, usize)> = (0..n)
        .map(|i| {
            let (p, q) = seg(i);
            (p[0].min(q[0]), p[0].max(q[0]), i)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));

    let mut raw = Vec::new();
    for (k, &(_, xmax, i)) in order.iter().enumerate() {
        let (p, q) = seg(i);
        let d = [q[0] - p[0], q[1] - p[1]];
        for &(xmin_j, _, j) in &order[k + 1..] {
            if xmin_j > xmax {
                break;
            }
            let (lo, hi) = (i.min(j), i.max(j));
            if hi - lo <= 1 || (lo == 0 && hi == n - 1) {
                continue;
            }
            let (p2, q2) = seg(j);
            if p[1].max(q[1]) < p2[1].min(q2[1]) || p2[1].max(q2[1]) < p[1].min(q[1]) {
                continue;
            }
            let e = [q2[0] - p2[0], q2[1] - p2[1]];
            let den = cross(d, e);
            if den == 0.0 {
                continue;
            }
            let f = [p2[0] - p[0], p2[1] - p[1]];
            let s = cross(f, e) / den;
            let t = cross(f, d) / den;
            // half-open parameter ranges so a crossing at a vertex counts once
            if (0.0..1.0).contains(&s) && (0.0..1.0).contains(&t) {
                let (pa, pb) = (param(i, s), param(j, t));
                let point = [p[0] + s * d[0], p[1] + s * d[1]];
                let (phi_a, phi_b) = if pa <= pb { (pa, pb) } else { (pb, pa) };
                raw.push(Crossing { phi_a, phi_b, point });
            }
        }
    }
    raw.sort_by(|a, b| a.phi_a.total_cmp(&b.phi_a).then(a.phi_b.total_cmp(&b.phi_b)));

    let mut merged: Vec<Crossing> = Vec::new();
    for c in raw {
        if angle_distance(c.phi_a, c.phi_b) <= merge_tol {
            continue;
        }
        let dup = merged.iter().any(|m| {
            angle_distance(m.phi_a, c.phi_a) <= merge_tol && angle_distance(m.phi_b, c.phi_b) <= merge_tol
        });
        if !dup {
            merged.push(c);
        }
    }
    merged
}

pub fn detect_self_intersections(slice: &CausticSlice) -> Vec<Crossing> {
    slice.crossings.clone()
}
