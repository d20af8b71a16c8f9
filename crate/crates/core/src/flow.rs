//! Hamiltonian geodesic flow, exponential map and its Jacobian.
//!
//! The Hamiltonian is `H = ½(h1² + h2²)` with `hᵢ = ⟨λ, Xᵢ⟩`. Arclength
//! geodesics start on the cylinder `H = ½`, parametrized at the origin by
//! `λ₀ = (cos φ, sin φ, r)`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::model::FrameField;
use crate::scalar::{Dual, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("integration failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },
    #[error("invalid time {0}")]
    BadTime(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotangentState {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl CotangentState {
    /// Initial state at the origin with covector `(cos φ, sin φ, r)`.
    pub fn initial(phi: f64, r: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { x: 0.0, y: 0.0, w: 0.0, p: c, q: s, r }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.x, self.y, self.w, self.p, self.q, self.r]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self { x: a[0], y: a[1], w: a[2], p: a[3], q: a[4], r: a[5] }
    }

    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.w]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    /// RK4 steps per Heisenberg period `2π/|r|`.
    pub steps_per_period: usize,
    /// Largest accepted `|H − ½|` along an arc.
    pub tol_energy: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self { steps_per_period: 2000, tol_energy: 1e-9 }
    }
}

impl IntegratorSettings {
    /// Nominal step for covector height `r`. Below `|r| = 1` the geodesics
    /// are no longer tight loops and the step is capped at the `|r| = 1` value.
    pub fn step_size(&self, r: f64) -> f64 {
        2.0 * PI / (self.steps_per_period.max(1) as f64 * r.abs().max(1.0))
    }
}

/// `(h1, h2)` and the partials of `H` in `(x, y, w, p, q, r)` order.
fn hamiltonian_parts<S: Scalar>(field: &FrameField, z: &[S; 6]) -> (S, S, [S; 6]) {
    let [x, y, w, p, q, r] = *z;
    let jet = field.jet(x, y, w);
    let one = S::from_f64(1.0);
    if !field.has_beta() {
        return hamiltonian_parts_no_beta(z, jet.gamma, jet.dgamma);
    }
    let b = jet.beta;
    let [bx, by, bw] = jet.dbeta;
    let g1 = one + jet.gamma;
    let [gx, gy, gw] = jet.dgamma;
    let xy = x * y;
    let half_r = r.scale(0.5);

    let h1 = p * (one + y * y * b) - q * xy * b + half_r * y * g1;
    let h2 = -(p * xy * b) + q * (one + x * x * b) - half_r * x * g1;

    let h1_p = one + y * y * b;
    let h1_q = -(xy * b);
    let h1_r = (y * g1).scale(0.5);
    let h2_p = -(xy * b);
    let h2_q = one + x * x * b;
    let h2_r = -(x * g1).scale(0.5);

    let h1_x = p * y * y * bx - q * (y * b + xy * bx) + half_r * y * gx;
    let h1_y = p * (y * b.scale(2.0) + y * y * by) - q * (x * b + xy * by)
        + half_r * (g1 + y * gy);
    let h1_w = (p * y * y - q * xy) * bw + half_r * y * gw;
    let h2_x = -(p * (y * b + xy * bx)) + q * (x * b.scale(2.0) + x * x * bx)
        - half_r * (g1 + x * gx);
    let h2_y = -(p * (x * b + xy * by)) + q * x * x * by - half_r * x * gy;
    let h2_w = (q * x * x - p * xy) * bw - half_r * x * gw;

    let grad = [
        h1 * h1_x + h2 * h2_x,
        h1 * h1_y + h2 * h2_y,
        h1 * h1_w + h2 * h2_w,
        h1 * h1_p + h2 * h2_p,
        h1 * h1_q + h2 * h2_q,
        h1 * h1_r + h2 * h2_r,
    ];
    (h1, h2, grad)
}

/// Same as [`hamiltonian_parts`] with `β ≡ 0`.
#[inline]
fn hamiltonian_parts_no_beta<S: Scalar>(z: &[S; 6], gamma: S, dgamma: [S; 3]) -> (S, S, [S; 6]) {
    let [x, y, _, p, q, r] = *z;
    let g1 = S::from_f64(1.0) + gamma;
    let [gx, gy, gw] = dgamma;
    let half_r = r.scale(0.5);
    let ry = half_r * y;
    let rx = half_r * x;
    let h1 = p + ry * g1;
    let h2 = q - rx * g1;
    let (a1, a2) = (h1 * half_r, h2 * half_r);
    let grad = [
        a1 * y * gx - a2 * (g1 + x * gx),
        a1 * (g1 + y * gy) - a2 * x * gy,
        (a1 * y - a2 * x) * gw,
        h1,
        h2,
        ((h1 * y - h2 * x) * g1).scale(0.5),
    ];
    (h1, h2, grad)
}

#[inline]
fn rhs<S: Scalar>(field: &FrameField, z: &[S; 6]) -> [S; 6] {
    let (_, _, g) = hamiltonian_parts(field, z);
    [g[3], g[4], g[5], -g[0], -g[1], -g[2]]
}

pub fn hamiltonian(field: &FrameField, state: &CotangentState) -> f64 {
    let (h1, h2, _) = hamiltonian_parts(field, &state.to_array());
    0.5 * (h1 * h1 + h2 * h2)
}

/// `(∂H/∂p, ∂H/∂q, ∂H/∂r, −∂H/∂x, −∂H/∂y, −∂H/∂w)`.
pub fn flow_rhs(field: &FrameField, state: &CotangentState) -> [f64; 6] {
    rhs(field, &state.to_array())
}

fn rk4_step<S: Scalar>(field: &FrameField, z: &[S; 6], dt: f64) -> [S; 6] {
    let axpy = |a: &[S; 6], k: &[S; 6], s: f64| -> [S; 6] {
        std::array::from_fn(|i| a[i] + k[i].scale(s))
    };
    let k1 = rhs(field, z);
    let k2 = rhs(field, &axpy(z, &k1, 0.5 * dt));
    let k3 = rhs(field, &axpy(z, &k2, 0.5 * dt));
    let k4 = rhs(field, &axpy(z, &k3, dt));
    std::array::from_fn(|i| {
        z[i] + (k1[i] + k2[i].scale(2.0) + k3[i].scale(2.0) + k4[i]).scale(dt / 6.0)
    })
}

fn check_finite<S: Scalar>(z: &[S; 6], t: f64) -> Result<(), FlowError> {
    if z.iter().all(|v| v.value().is_finite()) {
        Ok(())
    } else {
        Err(FlowError::StepFailure { t, reason: "non-finite state".into() })
    }
}

/// Sampled solution of the Hamiltonian system.
#[derive(Debug, Clone)]
pub struct GeodesicArc {
    pub phi: f64,
    pub r: f64,
    pub times: Vec<f64>,
    pub states: Vec<CotangentState>,
    /// `max |H − ½|` over the samples.
    pub energy_drift: f64,
}

impl GeodesicArc {
    pub fn last(&self) -> &CotangentState {
        self.states.last().expect("arc has at least one sample")
    }

    /// Cubic Hermite interpolation between samples, using the vector field
    /// for the endpoint slopes.
    pub fn state_at(&self, field: &FrameField, t: f64) -> CotangentState {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.states[0];
        }
        if t >= self.times[n - 1] {
            return self.states[n - 1];
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let dt = t1 - t0;
        let s = (t - t0) / dt;
        let (a, b) = (self.states[i].to_array(), self.states[i + 1].to_array());
        let (da, db) = (flow_rhs(field, &self.states[i]), flow_rhs(field, &self.states[i + 1]));
        let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
        let h10 = s.powi(3) - 2.0 * s * s + s;
        let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
        let h11 = s.powi(3) - s * s;
        CotangentState::from_array(std::array::from_fn(|k| {
            h00 * a[k] + h10 * dt * da[k] + h01 * b[k] + h11 * dt * db[k]
        }))
    }
}

/// Exact Heisenberg geodesic with initial covector `(cos φ, sin φ, r)`.
pub fn heisenberg_state(phi: f64, r: f64, t: f64) -> CotangentState {
    let (q0, p0) = phi.sin_cos();
    if r == 0.0 {
        return CotangentState { x: p0 * t, y: q0 * t, w: 0.0, p: p0, q: q0, r };
    }
    let (s, c) = (r * t).sin_cos();
    let x = (p0 * s - q0 * c + q0) / r;
    let y = (q0 * s + p0 * c - p0) / r;
    let w = (r * t - s) / (2.0 * r * r);
    let h1 = p0 * c + q0 * s;
    let h2 = q0 * c - p0 * s;
    CotangentState { x, y, w, p: h1 - 0.5 * r * y, q: h2 + 0.5 * r * x, r }
}

/// Integrates from `state0` up to `t_final` with fixed-step RK4.
pub fn integrate(
    field: &FrameField,
    state0: CotangentState,
    t_final: f64,
    settings: &IntegratorSettings,
) -> Result<GeodesicArc, FlowError> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(FlowError::BadTime(t_final));
    }
    let h0 = hamiltonian(field, &state0);
    let steps = steps_for(t_final, state0.r, settings);
    let dt = t_final / steps as f64;
    let mut z = state0.to_array();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(state0);
    let mut drift = (h0 - 0.5).abs();
    for n in 1..=steps {
        z = rk4_step(field, &z, dt);
        let t = if n == steps { t_final } else { n as f64 * dt };
        check_finite(&z, t)?;
        let s = CotangentState::from_array(z);
        let e = (hamiltonian(field, &s) - h0).abs();
        if e > settings.tol_energy {
            return Err(FlowError::StepFailure {
                t,
                reason: format!("energy drift {e:.3e} exceeds {:.1e}", settings.tol_energy),
            });
        }
        drift = drift.max((hamiltonian(field, &s) - 0.5).abs());
        times.push(t);
        states.push(s);
    }
    let (s, c) = (state0.q, state0.p);
    Ok(GeodesicArc { phi: s.atan2(c), r: state0.r, times, states, energy_drift: drift })
}

fn steps_for(t: f64, r: f64, settings: &IntegratorSettings) -> usize {
    (t / settings.step_size(r)).ceil().max(1.0) as usize
}

fn endpoint(
    field: &FrameField,
    z0: [f64; 6],
    t: f64,
    steps: usize,
) -> Result<[f64; 6], FlowError> {
    if t == 0.0 {
        return Ok(z0);
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(FlowError::BadTime(t));
    }
    let dt = t / steps as f64;
    let mut z = z0;
    for _ in 0..steps {
        z = rk4_step(field, &z, dt);
    }
    check_finite(&z, t)?;
    Ok(z)
}

/// Projection to `(x, y, w)` of the arclength geodesic with covector
/// `(cos φ, sin φ, r)` at time `t`.
pub fn exp_map(
    field: &FrameField,
    t: f64,
    phi: f64,
    r: f64,
    settings: &IntegratorSettings,
) -> Result<[f64; 3], FlowError> {
    let z0 = CotangentState::initial(phi, r).to_array();
    let z = endpoint(field, z0, t, steps_for(t, r, settings))?;
    Ok([z[0], z[1], z[2]])
}

/// State seeded with tangent directions `∂/∂φ` and `∂/∂r`.
pub(crate) fn dual_initial(phi: f64, r: f64) -> [Dual<2>; 6] {
    let (s, c) = phi.sin_cos();
    [
        Dual::constant(0.0),
        Dual::constant(0.0),
        Dual::constant(0.0),
        Dual::new(c, [-s, 0.0]),
        Dual::new(s, [c, 0.0]),
        Dual::new(r, [0.0, 1.0]),
    ]
}

/// Jacobian of the exponential map, columns `(∂t, ∂φ, ∂r)`, from the value
/// and tangents of a dual-number state.
pub(crate) fn jacobian_of(field: &FrameField, z: &[Dual<2>; 6]) -> Matrix3<f64> {
    let plain: [f64; 6] = std::array::from_fn(|i| z[i].v);
    let v = rhs(field, &plain);
    Matrix3::from_columns(&[
        Vector3::new(v[0], v[1], v[2]),
        Vector3::new(z[0].d[0], z[1].d[0], z[2].d[0]),
        Vector3::new(z[0].d[1], z[1].d[1], z[2].d[1]),
    ])
}

/// Partials of [`exp_map`] with respect to `(t, φ, r)`.
///
/// The φ and r columns are exact derivatives of the discrete RK4 map,
/// obtained by propagating dual numbers through the same steps.
pub fn exp_jacobian(
    field: &FrameField,
    t: f64,
    phi: f64,
    r: f64,
    settings: &IntegratorSettings,
) -> Result<Matrix3<f64>, FlowError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(FlowError::BadTime(t));
    }
    let mut z = dual_initial(phi, r);
    let steps = steps_for(t, r, settings);
    let dt = t / steps as f64;
    for _ in 0..steps {
        z = rk4_step(field, &z, dt);
    }
    check_finite(&z, t)?;
    Ok(jacobian_of(field, &z))
}

/// Central-difference Jacobian with one Richardson level. Slower and less
/// accurate than [`exp_jacobian`]; kept as an independent cross-check.
pub fn exp_jacobian_fd(
    field: &FrameField,
    t: f64,
    phi: f64,
    r: f64,
    settings: &IntegratorSettings,
) -> Result<Matrix3<f64>, FlowError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(FlowError::BadTime(t));
    }
    let period = 2.0 * PI / r.abs();
    let deltas = [1e-6 * period, 1e-6, 1e-6 * r.abs()];
    // fixed step count, so the discrete map stays smooth in t
    let steps = steps_for(t, r, settings);
    let eval = |k: usize, d: f64| -> Result<Vector3<f64>, FlowError> {
        let mut a = [t, phi, r];
        a[k] += d;
        let z = endpoint(field, CotangentState::initial(a[1], a[2]).to_array(), a[0], steps)?;
        Ok(Vector3::new(z[0], z[1], z[2]))
    };
    let mut cols = [Vector3::zeros(); 3];
    for (k, &d) in deltas.iter().enumerate() {
        let central = |d: f64| -> Result<Vector3<f64>, FlowError> {
            Ok((eval(k, d)? - eval(k, -d)?) / (2.0 * d))
        };
        let coarse = central(d)?;
        let fine = central(0.5 * d)?;
        cols[k] = (4.0 * fine - coarse) / 3.0;
    }
    Ok(Matrix3::from_columns(&cols))
}

/// Stepper carrying the `(φ, r)` tangents, used to scan `det J(t)`.
pub(crate) struct JacobianStepper<'a> {
    pub field: &'a FrameField,
    pub t: f64,
    pub z: [Dual<2>; 6],
}

impl<'a> JacobianStepper<'a> {
    pub fn new(field: &'a FrameField, phi: f64, r: f64) -> Self {
        Self { field, t: 0.0, z: dual_initial(phi, r) }
    }

    pub fn advance(&mut self, dt: f64) -> Result<(), FlowError> {
        self.z = rk4_step(self.field, &self.z, dt);
        self.t += dt;
        check_finite(&self.z, self.t)
    }

    /// State and Jacobian after a trial step of `dt` from the current state.
    pub fn peek(&self, dt: f64) -> ([Dual<2>; 6], Matrix3<f64>) {
        let z = if dt == 0.0 { self.z } else { rk4_step(self.field, &self.z, dt) };
        let j = jacobian_of(self.field, &z);
        (z, j)
    }

    pub fn jacobian(&self) -> Matrix3<f64> {
        jacobian_of(self.field, &self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{heisenberg, Monomial, NormalFormCoefficients};

    fn heis() -> FrameField {
        FrameField::new(&heisenberg()).unwrap()
    }

    fn generic() -> FrameField {
        FrameField::new(&NormalFormCoefficients {
            c0: 0.3, c1: -0.2, c2: 0.1, c11: 0.4, c12: -0.3, c31: 0.5, c32: 0.2,
            c421: 0.1, c422: -0.2, c423: 0.3, c441: 0.2, c442: -0.1, c443: 0.15,
            c444: 0.05, c445: -0.25,
            beta_terms: vec![Monomial::new(1, 0, 0, 0.3), Monomial::new(0, 1, 1, -0.2)],
            gamma_extra: vec![Monomial::new(3, 2, 0, 0.1)],
        })
        .unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let f = heis();
        for phi in [0.0, 0.7, 2.5, -1.0] {
            for r in [0.0, 1.0, -3.0, 20.0] {
                let h = hamiltonian(&f, &CotangentState::initial(phi, r));
                assert!((h - 0.5).abs() < 1e-15);
            }
        }
        let s = CotangentState { x: 0.0, y: 0.0, w: 0.0, p: 2.0, q: 0.0, r: 0.0 };
        assert_eq!(hamiltonian(&f, &s), 2.0);
        let s = CotangentState { x: 0.3, y: -0.4, w: 0.2, p: 0.0, q: 0.0, r: 0.0 };
        assert_eq!(hamiltonian(&generic(), &s), 0.0);
    }

    #[test]
    fn rhs_heisenberg_examples() {
        let f = heis();
        let s = CotangentState { x: 0.0, y: 0.0, w: 0.0, p: 1.0, q: 0.0, r: 1.0 };
        assert_eq!(flow_rhs(&f, &s), [1.0, 0.0, 0.0, 0.0, -0.5, 0.0]);
        let s = CotangentState { x: 0.0, y: 0.0, w: 0.0, p: 0.0, q: 0.0, r: 1.0 };
        let v = flow_rhs(&f, &s);
        assert_eq!((v[0], v[1]), (0.0, 0.0));
    }

    #[test]
    fn rhs_matches_finite_differences_of_hamiltonian() {
        let f = generic();
        let s0 = [0.21, -0.13, 0.07, 0.6, -0.8, 3.0];
        let v = flow_rhs(&f, &CotangentState::from_array(s0));
        let d = 1e-5;
        for k in 0..6 {
            let mut a = s0;
            let mut b = s0;
            a[k] += d;
            b[k] -= d;
            let fd = (hamiltonian(&f, &CotangentState::from_array(a))
                - hamiltonian(&f, &CotangentState::from_array(b)))
                / (2.0 * d);
            let expected = if k < 3 { -v[k + 3] } else { v[k - 3] };
            assert!((fd - expected).abs() < 1e-8, "component {k}: {fd} vs {expected}");
        }
    }

    #[test]
    fn short_time_taylor_consistency() {
        let f = generic();
        let s0 = CotangentState::initial(0.4, 5.0);
        let v = flow_rhs(&f, &s0);
        for t in [1e-3, 5e-4] {
            let arc = integrate(&f, s0, t, &IntegratorSettings::default()).unwrap();
            let z = arc.last().to_array();
            let a = s0.to_array();
            let err = (0..6).map(|i| (z[i] - a[i] - t * v[i]).abs()).fold(0.0, f64::max);
            assert!(err < 20.0 * t * t, "t={t}: {err}");
        }
    }

    #[test]
    fn energy_is_conserved_for_generic_coefficients() {
        let f = generic();
        let arc = integrate(&f, CotangentState::initial(1.1, 8.0), 2.0 * PI / 8.0, &Default::default())
            .unwrap();
        assert!(arc.energy_drift < 1e-11, "{}", arc.energy_drift);
        assert!(arc.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn energy_tolerance_violation_is_step_failure() {
        let f = generic();
        let s = IntegratorSettings { steps_per_period: 3, tol_energy: 1e-14 };
        let err = integrate(&f, CotangentState::initial(0.3, 2.0), 3.0, &s).unwrap_err();
        assert!(matches!(err, FlowError::StepFailure { .. }));
    }

    #[test]
    fn exp_map_at_time_zero_is_origin() {
        assert_eq!(exp_map(&generic(), 0.0, 1.0, 3.0, &Default::default()).unwrap(), [0.0; 3]);
    }

    #[test]
    fn dense_output_interpolates_between_samples() {
        let f = generic();
        let s = IntegratorSettings::default();
        let arc = integrate(&f, CotangentState::initial(0.2, 6.0), 0.9, &s).unwrap();
        let direct = exp_map(&f, 0.4321, 0.2, 6.0, &s).unwrap();
        let interp = arc.state_at(&f, 0.4321).position();
        for k in 0..3 {
            assert!((direct[k] - interp[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn dual_jacobian_agrees_with_finite_differences() {
        let f = generic();
        let s = IntegratorSettings::default();
        let (t, phi, r) = (0.8, 0.9, 7.0);
        let a = exp_jacobian(&f, t, phi, r, &s).unwrap();
        let b = exp_jacobian_fd(&f, t, phi, r, &s).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-7 * (1.0 + x.abs()), "{a} vs {b}");
        }
    }
}
