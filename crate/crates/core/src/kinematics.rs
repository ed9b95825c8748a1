//! Forward-Euler kinematics for the five motion models and limit enforcement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Pose2;

/// Continuous-time motion model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MotionModel {
    /// Differential drive / unicycle, control `(v, ω)`.
    Diff,
    /// Bicycle model, control `(v, δ)`.
    Ackermann { wheelbase: f64 },
    /// Body-frame planar velocity, control `(v_x, v_y, ω)`.
    Omni,
    /// Rotation in place, control `(ω)`.
    Spin,
    /// Lateral translation with fixed heading, control `(v_para)`.
    Parallel,
}

impl MotionModel {
    pub fn name(&self) -> &'static str {
        match self {
            MotionModel::Diff => "diff",
            MotionModel::Ackermann { .. } => "ackermann",
            MotionModel::Omni => "omni",
            MotionModel::Spin => "spin",
            MotionModel::Parallel => "parallel",
        }
    }

    /// Number of control components.
    pub fn control_dim(&self) -> usize {
        match self {
            MotionModel::Diff | MotionModel::Ackermann { .. } => 2,
            MotionModel::Omni => 3,
            MotionModel::Spin | MotionModel::Parallel => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let MotionModel::Ackermann { wheelbase } = self {
            if !(*wheelbase > 0.0) || !wheelbase.is_finite() {
                return Err(Error::Params(format!("ackermann wheelbase {wheelbase} must be positive")));
            }
        }
        Ok(())
    }

    /// Right-hand side `F_m(q, u)` as `(ẋ, ẏ, θ̇)`.
    pub fn derivative(&self, q: &Pose2, u: &ControlInput) -> Result<[f64; 3]> {
        self.check(u)?;
        Ok(self.derivative_raw(q, &u.c))
    }

    pub(crate) fn check(&self, u: &ControlInput) -> Result<()> {
        if u.dim() != self.control_dim() {
            return Err(Error::ControlMismatch {
                model: self.name(),
                expected: self.control_dim(),
                got: u.dim(),
            });
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn derivative_raw(&self, q: &Pose2, c: &[f64; 3]) -> [f64; 3] {
        let (s, co) = q.theta.sin_cos();
        match *self {
            MotionModel::Diff => [c[0] * co, c[0] * s, c[1]],
            MotionModel::Ackermann { wheelbase } => [c[0] * co, c[0] * s, c[0] / wheelbase * c[1].tan()],
            MotionModel::Omni => [c[0] * co - c[1] * s, c[0] * s + c[1] * co, c[2]],
            MotionModel::Spin => [0.0, 0.0, c[0]],
            MotionModel::Parallel => [-c[0] * s, c[0] * co, 0.0],
        }
    }

    #[inline]
    pub(crate) fn step_raw(&self, q: &Pose2, c: &[f64; 3], dt: f64) -> Pose2 {
        let f = self.derivative_raw(q, c);
        Pose2::new(q.x + f[0] * dt, q.y + f[1] * dt, q.theta + f[2] * dt)
    }

    /// One forward-Euler step `q + F_m(q, u)·dt`.
    pub fn step(&self, q: &Pose2, u: &ControlInput, dt: f64) -> Result<Pose2> {
        self.check(u)?;
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt {dt} must be positive")));
        }
        Ok(self.step_raw(q, &u.c, dt))
    }

    /// Propagates `q0` through `controls`; the result has `controls.len() + 1` poses.
    pub fn rollout(&self, q0: &Pose2, controls: &[ControlInput], dt: f64) -> Result<Vec<Pose2>> {
        if controls.is_empty() {
            return Err(Error::InvalidArgument("rollout needs at least one control".into()));
        }
        let mut traj = Vec::with_capacity(controls.len() + 1);
        traj.push(*q0);
        let mut q = *q0;
        for u in controls {
            q = self.step(&q, u, dt)?;
            traj.push(q);
        }
        Ok(traj)
    }
}

/// Model-shaped control vector with up to three components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    dim: u8,
    pub(crate) c: [f64; 3],
}

impl ControlInput {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "control dimension must be 1..=3");
        Self { dim: dim as u8, c: [0.0; 3] }
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut u = Self::zeros(values.len());
        u.c[..values.len()].copy_from_slice(values);
        u
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c[..self.dim()]
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        let d = self.dim();
        &mut self.c[..d]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.as_slice()[i]
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|v| v.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.as_slice().iter().all(|&v| v == 0.0)
    }
}

impl Serialize for ControlInput {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ControlInput {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(deserializer)?;
        if !(1..=3).contains(&v.len()) {
            return Err(serde::de::Error::custom("control must have 1 to 3 components"));
        }
        Ok(ControlInput::from_slice(&v))
    }
}

/// Closed interval `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Bound {
    pub min: f64,
    pub max: f64,
}

impl Bound {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub const fn symmetric(limit: f64) -> Self {
        Self::new(-limit, limit)
    }

    pub const UNBOUNDED: Bound = Bound::new(f64::NEG_INFINITY, f64::INFINITY);

    #[inline]
    pub fn clamp(&self, v: f64) -> f64 {
        v.max(self.min).min(self.max)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }
}

impl From<[f64; 2]> for Bound {
    fn from(v: [f64; 2]) -> Self {
        Bound::new(v[0], v[1])
    }
}

impl From<Bound> for [f64; 2] {
    fn from(b: Bound) -> Self {
        [b.min, b.max]
    }
}

/// Per-component value bounds and rate bounds.
///
/// For the Ackermann model the second value bound is the steering-angle
/// limit (rad) and its rate bound is the steering rate (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KinematicLimits {
    pub velocity: Vec<Bound>,
    pub acceleration: Vec<Bound>,
}

impl KinematicLimits {
    pub fn new(velocity: Vec<Bound>, acceleration: Vec<Bound>) -> Result<Self> {
        let limits = Self { velocity, acceleration };
        limits.validate_shape()?;
        Ok(limits)
    }

    fn validate_shape(&self) -> Result<()> {
        if self.velocity.len() != self.acceleration.len() {
            return Err(Error::Params("velocity and acceleration bounds differ in length".into()));
        }
        for (i, b) in self.velocity.iter().chain(&self.acceleration).enumerate() {
            if b.min.is_nan() || b.max.is_nan() || b.min > b.max {
                return Err(Error::Params(format!("bound {i} has min > max: [{}, {}]", b.min, b.max)));
            }
        }
        Ok(())
    }

    pub fn validate_for(&self, model: &MotionModel) -> Result<()> {
        self.validate_shape()?;
        if self.velocity.len() != model.control_dim() {
            return Err(Error::Params(format!(
                "limits have {} components but model `{}` has {}",
                self.velocity.len(),
                model.name(),
                model.control_dim()
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.velocity.len()
    }

    /// Limits of the hardware platforms: diff `v ±1.5, ω ±1.0`; omni
    /// `v_x ±1.0, v_y ±0.4, ω ±1.0`; parallel `±0.6`; spin `ω ±1.0` with
    /// `±2.0 rad/s²`; unit acceleration elsewhere. Ackermann reuses the
    /// diff speed limit with a ±0.6 rad steering bound.
    pub fn platform_defaults(model: &MotionModel) -> Self {
        let s = Bound::symmetric;
        let (vel, acc) = match model {
            MotionModel::Diff => (vec![s(1.5), s(1.0)], vec![s(1.0), s(1.0)]),
            MotionModel::Ackermann { .. } => (vec![s(1.5), s(0.6)], vec![s(1.0), s(1.0)]),
            MotionModel::Omni => (vec![s(1.0), s(0.4), s(1.0)], vec![s(1.0), s(1.0), s(1.0)]),
            MotionModel::Spin => (vec![s(1.0)], vec![s(2.0)]),
            MotionModel::Parallel => (vec![s(0.6)], vec![s(1.0)]),
        };
        Self {
            velocity: vel,
            acceleration: acc,
        }
    }

    /// Velocity clip, then per-component rate clip relative to `prev`.
    #[inline]
    pub(crate) fn clamp_raw(&self, u: &[f64; 3], prev: &[f64; 3], dt: f64) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..self.velocity.len() {
            let v = self.velocity[i].clamp(u[i]);
            let a = &self.acceleration[i];
            let delta = (v - prev[i]).max(a.min * dt).min(a.max * dt);
            out[i] = prev[i] + delta;
        }
        out
    }

    /// Clips `u` to the velocity bounds and then so that `(u − u_prev)/dt`
    /// respects the acceleration bounds.
    pub fn clamp_control(&self, u: &ControlInput, u_prev: &ControlInput, dt: f64) -> Result<ControlInput> {
        if u.dim() != self.dim() || u_prev.dim() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "clamp expects {} components, got {} and {}",
                self.dim(),
                u.dim(),
                u_prev.dim()
            )));
        }
        let mut out = ControlInput::zeros(self.dim());
        out.c = self.clamp_raw(&u.c, &u_prev.c, dt);
        Ok(out)
    }

    /// Whether `u` is inside the velocity box and reachable from `u_prev` within `dt`.
    pub fn admits(&self, u: &ControlInput, u_prev: &ControlInput, dt: f64, tol: f64) -> bool {
        (0..self.dim()).all(|i| {
            let v = u.c[i];
            let rate = v - u_prev.c[i];
            let vb = &self.velocity[i];
            let ab = &self.acceleration[i];
            v >= vb.min - tol && v <= vb.max + tol && rate >= ab.min * dt - tol && rate <= ab.max * dt + tol
        })
    }
}

/// Free-function form of [`KinematicLimits::clamp_control`].
pub fn clamp_control(u: &ControlInput, u_prev: &ControlInput, limits: &KinematicLimits, dt: f64) -> Result<ControlInput> {
    limits.clamp_control(u, u_prev, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn u(v: &[f64]) -> ControlInput {
        ControlInput::from_slice(v)
    }

    fn assert_triple(got: [f64; 3], want: [f64; 3]) {
        for i in 0..3 {
            assert_relative_eq!(got[i], want[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn derivative_examples() {
        let q0 = Pose2::default();
        assert_triple(MotionModel::Diff.derivative(&q0, &u(&[1.0, 0.0])).unwrap(), [1.0, 0.0, 0.0]);
        let ack = MotionModel::Ackermann { wheelbase: 1.0 };
        assert_triple(ack.derivative(&q0, &u(&[1.0, FRAC_PI_4])).unwrap(), [1.0, 0.0, 1.0]);
        let q = Pose2::new(0.0, 0.0, FRAC_PI_2);
        assert_triple(MotionModel::Omni.derivative(&q, &u(&[0.0, 1.0, 0.0])).unwrap(), [-1.0, 0.0, 0.0]);
        assert_triple(MotionModel::Parallel.derivative(&q0, &u(&[1.0])).unwrap(), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn derivative_rejects_mismatched_control() {
        let err = MotionModel::Omni.derivative(&Pose2::default(), &u(&[1.0, 0.0]));
        assert!(matches!(err, Err(Error::ControlMismatch { expected: 3, got: 2, .. })));
    }

    #[test]
    fn step_examples() {
        let q = MotionModel::Diff.step(&Pose2::default(), &u(&[1.0, 0.0]), 0.1).unwrap();
        assert_relative_eq!(q.x, 0.1);
        let q = MotionModel::Spin.step(&Pose2::new(1.0, 2.0, 0.0), &u(&[1.0]), 0.1).unwrap();
        assert_eq!((q.x, q.y), (1.0, 2.0));
        assert_relative_eq!(q.theta, 0.1);
        let q = MotionModel::Diff
            .step(&Pose2::new(0.0, 0.0, FRAC_PI_2), &u(&[2.0, 0.0]), 0.5)
            .unwrap();
        assert_relative_eq!(q.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(q.y, 1.0);
        assert_relative_eq!(q.theta, FRAC_PI_2);
        assert!(MotionModel::Diff.step(&q, &u(&[1.0, 0.0]), 0.0).is_err());
    }

    #[test]
    fn clamp_examples() {
        let limits = KinematicLimits::platform_defaults(&MotionModel::Diff);
        let unlimited_rate = KinematicLimits::new(limits.velocity.clone(), vec![Bound::UNBOUNDED; 2]).unwrap();
        let out = unlimited_rate.clamp_control(&u(&[2.0, 0.0]), &u(&[0.0, 0.0]), 0.1).unwrap();
        assert_eq!(out, u(&[1.5, 0.0]));

        let inside = u(&[0.55, 0.05]);
        let prev = u(&[0.5, 0.0]);
        assert_eq!(limits.clamp_control(&inside, &prev, 0.1).unwrap(), inside);

        let out = limits.clamp_control(&u(&[1.0, 0.0]), &u(&[0.0, 0.0]), 0.1).unwrap();
        assert_relative_eq!(out.get(0), 0.1);
        assert_eq!(out.get(1), 0.0);
    }

    #[test]
    fn rollout_examples() {
        let zeros = vec![u(&[0.0, 0.0]); 4];
        let q0 = Pose2::new(1.0, -1.0, 0.3);
        assert!(MotionModel::Diff.rollout(&q0, &zeros, 0.1).unwrap().iter().all(|q| *q == q0));

        let traj = MotionModel::Diff.rollout(&Pose2::default(), &vec![u(&[1.0, 0.0]); 5], 0.1).unwrap();
        assert_eq!(traj.len(), 6);
        for (h, q) in traj.iter().enumerate() {
            assert_relative_eq!(q.x, 0.1 * h as f64, epsilon = 1e-12);
        }
        assert!(MotionModel::Diff.rollout(&q0, &[], 0.1).is_err());
    }

    #[test]
    fn ackermann_straight_matches_diff() {
        let ack = MotionModel::Ackermann { wheelbase: 0.7 };
        let q0 = Pose2::new(0.2, 0.1, 0.4);
        let a = ack.rollout(&q0, &vec![u(&[0.8, 0.0]); 20], 0.1).unwrap();
        let d = MotionModel::Diff.rollout(&q0, &vec![u(&[0.8, 0.0]); 20], 0.1).unwrap();
        assert_eq!(a, d);
    }

    #[test]
    fn model_json_round_trip() {
        let m: MotionModel = serde_json::from_str(r#"{"kind":"ackermann","wheelbase":0.5}"#).unwrap();
        assert_eq!(m, MotionModel::Ackermann { wheelbase: 0.5 });
        let m: MotionModel = serde_json::from_str(r#"{"kind":"omni"}"#).unwrap();
        assert_eq!(m.control_dim(), 3);
        assert!(MotionModel::Ackermann { wheelbase: 0.0 }.validate().is_err());
    }
}
