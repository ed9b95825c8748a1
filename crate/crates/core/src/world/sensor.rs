//! Point-based range sensor: boundary sampling, range gating, angular
//! occlusion and seeded downsampling to a fixed budget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::obstacle::PlacedShape;
use crate::controller::mix64;
use crate::error::{Error, Result};
use crate::geometry::{ObstacleSet, Point2, Pose2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorSpec {
    /// Maximum range (m).
    pub range: f64,
    /// Point budget N.
    pub budget: usize,
    /// Boundary sampling spacing (m).
    pub spacing: f64,
    /// Angular bins of the visibility model.
    pub bins: usize,
}

impl Default for SensorSpec {
    fn default() -> Self {
        Self {
            range: 6.0,
            budget: 100,
            spacing: 0.05,
            bins: 720,
        }
    }
}

impl SensorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(Error::scenario("/sensor/budget", "must be at least 1"));
        }
        if !(self.range > 0.0) {
            return Err(Error::scenario("/sensor/range", "must be positive"));
        }
        if !(self.spacing > 0.0) {
            return Err(Error::scenario("/sensor/spacing", "must be positive"));
        }
        if self.bins < 1 {
            return Err(Error::scenario("/sensor/bins", "must be at least 1"));
        }
        Ok(())
    }
}

fn bin_of(angle: f64, bins: usize) -> usize {
    let t = (angle + std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
    ((t * bins as f64).floor() as usize).min(bins - 1)
}

/// Range along the ray at `angle` to segment `a`–`b` (sensor at origin).
fn ray_segment_range(angle: f64, a: Point2, b: Point2) -> Option<f64> {
    let d = Point2::new(angle.cos(), angle.sin());
    let e = b - a;
    let denom = d.cross(e);
    if denom.abs() < 1e-15 {
        return None;
    }
    let t = a.cross(e) / denom;
    let u = a.cross(d) / denom;
    (t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u)).then_some(t)
}

/// Nearest boundary range per angular bin, from ray casts through the bin centers.
fn occlusion_ranges(shapes: &[PlacedShape], origin: Point2, range: f64, bins: usize) -> Vec<f64> {
    let mut nearest = vec![f64::INFINITY; bins];
    let width = 2.0 * std::f64::consts::PI / bins as f64;
    for shape in shapes {
        for (a, b) in shape.edges(64) {
            let (a, b) = (a - origin, b - origin);
            if a.norm().min(b.norm()) > range + a.distance(b) {
                continue;
            }
            let (aa, ab) = (a.y.atan2(a.x), b.y.atan2(b.x));
            let mut span = ab - aa;
            if span > std::f64::consts::PI {
                span -= 2.0 * std::f64::consts::PI;
            } else if span < -std::f64::consts::PI {
                span += 2.0 * std::f64::consts::PI;
            }
            let (start, sweep) = if span >= 0.0 { (aa, span) } else { (ab, -span) };
            let first = bin_of(start, bins);
            let count = (sweep / width).ceil() as usize + 1;
            for k in 0..=count {
                let bin = (first + k) % bins;
                let center = -std::f64::consts::PI + (bin as f64 + 0.5) * width;
                if let Some(r) = ray_segment_range(center, a, b) {
                    nearest[bin] = nearest[bin].min(r);
                }
            }
        }
    }
    nearest
}

/// Visible boundary points around `pose`, at most `spec.budget` of them.
/// `seed` and `cycle` key the downsampling phase.
pub fn sense(shapes: &[PlacedShape], pose: &Pose2, spec: &SensorSpec, seed: u64, cycle: u64) -> ObstacleSet {
    let origin = pose.position();
    let mut samples = Vec::new();
    for s in shapes {
        s.boundary_samples(spec.spacing, &mut samples);
    }
    let occluder = occlusion_ranges(shapes, origin, spec.range, spec.bins);
    let mut best: Vec<Option<(f64, Point2)>> = vec![None; spec.bins];
    for p in samples {
        let rel = p - origin;
        let r = rel.norm();
        if r > spec.range {
            continue;
        }
        let bin = bin_of(rel.y.atan2(rel.x), spec.bins);
        if r > occluder[bin] + spec.spacing {
            continue;
        }
        if best[bin].is_none_or(|(rb, _)| r < rb) {
            best[bin] = Some((r, p));
        }
    }
    let visible: Vec<Point2> = best.into_iter().flatten().map(|(_, p)| p).collect();
    let n = spec.budget;
    if visible.len() <= n {
        return ObstacleSet::from_points(&visible, n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ 0x5EA5_0000, cycle));
    let phase: f64 = rng.random();
    let stride = visible.len() as f64 / n as f64;
    let picked: Vec<Point2> = (0..n)
        .map(|i| visible[(((i as f64 + phase) * stride) as usize).min(visible.len() - 1)])
        .collect();
    ObstacleSet::from_points(&picked, n)
}
