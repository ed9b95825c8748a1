//! Stage costs: obstacle penalty, guidance-following task cost and control effort.

use serde::{Deserialize, Serialize};

use super::params::{MppiParams, TaskWeights};
use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, Point2, Pose2};

/// `w_coll·1(d < 0) + w_rep·max(d_safe − d, 0)²`.
#[inline]
pub fn obstacle_cost(d: f64, params: &MppiParams) -> f64 {
    let collision = if d < 0.0 { params.w_coll } else { 0.0 };
    let gap = (params.d_safe - d).max(0.0);
    collision + params.w_rep * gap * gap
}

/// Weak guidance: a waypoint polyline and the goal pose it leads to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GuidanceRepr", into = "GuidanceRepr")]
pub struct Guidance {
    path: Vec<Point2>,
    goal: Pose2,
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GuidanceRepr {
    path: Vec<Point2>,
    goal: Pose2,
}

impl TryFrom<GuidanceRepr> for Guidance {
    type Error = Error;
    fn try_from(r: GuidanceRepr) -> Result<Self> {
        Guidance::new(r.path, r.goal)
    }
}

impl From<Guidance> for GuidanceRepr {
    fn from(g: Guidance) -> Self {
        GuidanceRepr { path: g.path, goal: g.goal }
    }
}

/// Result of projecting a point onto the guidance polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathProjection {
    /// Distance to the closest polyline point.
    pub distance: f64,
    /// Arc length from the first waypoint to the closest point.
    pub progress: f64,
}

impl Guidance {
    pub fn new(path: Vec<Point2>, goal: Pose2) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::InvalidArgument("guidance polyline is empty".into()));
        }
        if !goal.is_finite() || path.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument("guidance contains non-finite values".into()));
        }
        let mut cumulative = Vec::with_capacity(path.len());
        let mut total = 0.0;
        cumulative.push(0.0);
        for w in path.windows(2) {
            total += w[0].distance(w[1]);
            cumulative.push(total);
        }
        Ok(Self { path, goal, cumulative })
    }

    /// Straight segment from `start` to the goal position.
    pub fn straight(start: Point2, goal: Pose2) -> Self {
        Self::new(vec![start, goal.position()], goal).expect("finite endpoints")
    }

    pub fn path(&self) -> &[Point2] {
        &self.path
    }

    pub fn goal(&self) -> Pose2 {
        self.goal
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Closest point on the polyline. Ties go to the earliest segment.
    pub fn project(&self, p: Point2) -> PathProjection {
        if self.path.len() == 1 {
            return PathProjection {
                distance: p.distance(self.path[0]),
                progress: 0.0,
            };
        }
        let mut best = PathProjection {
            distance: f64::INFINITY,
            progress: 0.0,
        };
        for (i, w) in self.path.windows(2).enumerate() {
            let e = w[1] - w[0];
            let len_sq = e.norm_squared();
            let t = if len_sq > 0.0 {
                ((p - w[0]).dot(e) / len_sq).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let d = p.distance(w[0] + e * t);
            if d < best.distance {
                best = PathProjection {
                    distance: d,
                    progress: self.cumulative[i] + t * len_sq.sqrt(),
                };
            }
        }
        best
    }
}

/// Per-step task cost: goal attraction, cross-track penalty and progress reward.
#[inline]
pub fn running_task_cost(q: &Pose2, guidance: &Guidance, w: &TaskWeights) -> f64 {
    let pos = q.position();
    let goal_sq = (pos - guidance.goal().position()).norm_squared();
    let proj = guidance.project(pos);
    w.goal * goal_sq + w.xtrack * proj.distance * proj.distance - w.progress * proj.progress
}

/// Terminal goal-distance and wrapped heading terms.
#[inline]
pub fn terminal_task_cost(q: &Pose2, guidance: &Guidance, w: &TaskWeights) -> f64 {
    let goal = guidance.goal();
    let goal_sq = (q.position() - goal.position()).norm_squared();
    let dh = wrap_angle(q.theta - goal.theta);
    w.goal_terminal * goal_sq + w.heading * dh * dh
}

/// Task cost of state `q`; the terminal terms are added when `terminal` is set.
pub fn task_cost(q: &Pose2, guidance: &Guidance, w: &TaskWeights, terminal: bool) -> f64 {
    let mut cost = running_task_cost(q, guidance, w);
    if terminal {
        cost += terminal_task_cost(q, guidance, w);
    }
    cost
}

/// `Σ_i w_i u_i²`.
#[inline]
pub fn control_cost(u: &[f64; 3], weights: &[f64; 3]) -> f64 {
    weights[0] * u[0] * u[0] + weights[1] * u[1] * u[1] + weights[2] * u[2] * u[2]
}
