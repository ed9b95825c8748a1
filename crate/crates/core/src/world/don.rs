//! Degree of narrowness: effective robot width over declared passage width.

use super::scenario::{GapSpec, Scenario};
use crate::error::{Error, Result};
use crate::geometry::{directional_width, FootprintSpec, Point2};
use crate::kinematics::MotionModel;

/// Width the robot presents across its direction of travel. Forward-driving
/// models use the lateral body width, parallel motion the longitudinal span,
/// and omni motion the smaller of the two body-axis widths.
pub fn effective_width(footprint: &FootprintSpec, model: &MotionModel) -> f64 {
    let along_x = directional_width(footprint, Point2::new(1.0, 0.0)).expect("unit");
    let along_y = directional_width(footprint, Point2::new(0.0, 1.0)).expect("unit");
    match model {
        MotionModel::Diff | MotionModel::Ackermann { .. } | MotionModel::Spin => along_y,
        MotionModel::Parallel => along_x,
        MotionModel::Omni => along_x.min(along_y),
    }
}

/// Passage width of `gap` measured across the world-frame travel direction.
pub fn passage_width(gap: &GapSpec, direction: Point2) -> Result<f64> {
    let len = direction.norm();
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::InvalidArgument("translation direction must be nonzero".into()));
    }
    let n = Point2::new(-direction.y, direction.x) * (1.0 / len);
    Ok((gap.b - gap.a).dot(n).abs())
}

/// `W_r / W_p` for the scenario's motion model (the first mode for hybrid runs).
pub fn compute_don(scenario: &Scenario, footprint: &FootprintSpec, direction: Point2) -> Result<f64> {
    let gap = scenario
        .gap
        .as_ref()
        .ok_or_else(|| Error::scenario("/gap", "scenario declares no gap"))?;
    let model = match &scenario.hybrid {
        Some(h) => h.modes[h.initial_mode].model,
        None => scenario.model,
    };
    Ok(effective_width(footprint, &model) / passage_width(gap, direction)?)
}
