//! Scenario description: robot, controller settings, obstacles and task.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::obstacle::{ground_truth_collision, Obstacle, PlacedShape};
use super::sensor::SensorSpec;
use crate::controller::{Guidance, MppiParams};
use crate::error::{Error, Result};
use crate::geometry::{FootprintSpec, Point2, Pose2};
use crate::hybrid::{HybridParams, ModeSpec};
use crate::kinematics::{KinematicLimits, MotionModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalTolerance {
    /// Position tolerance (m).
    pub position: f64,
    /// Wrapped heading tolerance (rad).
    pub heading: f64,
}

impl Default for GoalTolerance {
    fn default() -> Self {
        Self {
            position: 0.3,
            heading: std::f64::consts::PI,
        }
    }
}

/// Declared passage cross-section used for the narrowness ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapSpec {
    pub a: Point2,
    pub b: Point2,
}

/// Failure when displacement over `window` seconds stays below `distance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StallSpec {
    pub window: f64,
    pub distance: f64,
}

impl Default for StallSpec {
    fn default() -> Self {
        Self {
            window: 15.0,
            distance: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridSpec {
    #[serde(default)]
    pub params: HybridParams,
    pub modes: Vec<ModeSpec>,
    #[serde(default)]
    pub initial_mode: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub footprint: FootprintSpec,
    pub model: MotionModel,
    /// Platform defaults for `model` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<KinematicLimits>,
    #[serde(default)]
    pub mppi: MppiParams,
    /// Replaces `model` with switched modes when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hybrid: Option<HybridSpec>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    pub start: Pose2,
    pub goal: Pose2,
    #[serde(default)]
    pub goal_tolerance: GoalTolerance,
    /// Waypoint polyline; empty means the straight segment from start to goal.
    #[serde(default)]
    pub guidance: Vec<Point2>,
    #[serde(default)]
    pub sensor: SensorSpec,
    pub time_limit: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapSpec>,
    #[serde(default)]
    pub stall: StallSpec,
}

/// Renders a `serde_path_to_error` path as a JSON pointer.
fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl Scenario {
    /// Parses and validates; errors carry the JSON pointer of the offending field.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = json_pointer(e.path());
            Error::scenario(pointer, e.into_inner().to_string())
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn limits(&self) -> KinematicLimits {
        self.limits
            .clone()
            .unwrap_or_else(|| KinematicLimits::platform_defaults(&self.model))
    }

    pub fn guidance(&self) -> Guidance {
        if self.guidance.is_empty() {
            Guidance::straight(self.start.position(), self.goal)
        } else {
            Guidance::new(self.guidance.clone(), self.goal).expect("validated guidance")
        }
    }

    pub fn shapes_at(&self, time: f64) -> Vec<PlacedShape> {
        self.obstacles.iter().map(|o| o.shape_at(time)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let at = |p: &str, e: Error| Error::scenario(p, e.to_string());
        self.model.validate().map_err(|e| at("/model", e))?;
        if let Some(l) = &self.limits {
            l.validate_for(&self.model).map_err(|e| at("/limits", e))?;
        }
        self.mppi.validate_for(&self.model).map_err(|e| at("/mppi", e))?;
        if let Some(h) = &self.hybrid {
            h.params.validate().map_err(|e| at("/hybrid/params", e))?;
            if h.modes.is_empty() {
                return Err(Error::scenario("/hybrid/modes", "needs at least one mode"));
            }
            if h.initial_mode >= h.modes.len() {
                return Err(Error::scenario("/hybrid/initial_mode", "out of range"));
            }
            for (i, m) in h.modes.iter().enumerate() {
                let p = format!("/hybrid/modes/{i}");
                m.model.validate().map_err(|e| at(&p, e))?;
                if let Some(l) = &m.limits {
                    l.validate_for(&m.model).map_err(|e| at(&format!("{p}/limits"), e))?;
                }
                self.mppi.validate_for(&m.model).map_err(|e| at(&p, e))?;
            }
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            o.validate(&format!("/obstacles/{i}"))?;
        }
        for (name, q) in [("/start", &self.start), ("/goal", &self.goal)] {
            if !q.is_finite() {
                return Err(Error::scenario(name, "must be finite"));
            }
        }
        if !(self.goal_tolerance.position > 0.0) {
            return Err(Error::scenario("/goal_tolerance/position", "must be positive"));
        }
        if !(self.goal_tolerance.heading > 0.0) {
            return Err(Error::scenario("/goal_tolerance/heading", "must be positive"));
        }
        if self.guidance.iter().any(|p| !p.is_finite()) {
            return Err(Error::scenario("/guidance", "must be finite"));
        }
        self.sensor.validate()?;
        if !(self.time_limit > 0.0) || !self.time_limit.is_finite() {
            return Err(Error::scenario("/time_limit", "must be positive"));
        }
        if !(self.stall.window > 0.0) || !(self.stall.distance >= 0.0) {
            return Err(Error::scenario("/stall", "window must be positive and distance nonnegative"));
        }
        if ground_truth_collision(&self.footprint, &self.start, &self.shapes_at(0.0)) {
            return Err(Error::scenario("/start", "robot starts in collision"));
        }
        Ok(())
    }
}
