//! Obstacle shapes, trail motion and shape-level collision truth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, segments_intersect, signed_area, FootprintSpec, Point2, PolygonFootprint, Pose2};

/// Obstacle geometry in the world frame at trail offset zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObstacleShape {
    Polygon { vertices: Vec<Point2> },
    Disc { center: Point2, radius: f64 },
}

/// How an obstacle moves between control cycles.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObstacleMotion {
    #[default]
    Static,
    /// Translation along a polyline at constant speed, reversing at the ends.
    /// The shape is displaced by `trail(s) − waypoints[0]`.
    Trail { waypoints: Vec<Point2>, speed: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub shape: ObstacleShape,
    #[serde(default)]
    pub motion: ObstacleMotion,
}

impl Obstacle {
    pub fn polygon(vertices: Vec<Point2>) -> Self {
        Self {
            shape: ObstacleShape::Polygon { vertices },
            motion: ObstacleMotion::Static,
        }
    }

    /// Axis-aligned box from its corners.
    pub fn rect(min: Point2, max: Point2) -> Self {
        Self::polygon(vec![min, Point2::new(max.x, min.y), max, Point2::new(min.x, max.y)])
    }

    pub fn disc(center: Point2, radius: f64) -> Self {
        Self {
            shape: ObstacleShape::Disc { center, radius },
            motion: ObstacleMotion::Static,
        }
    }

    pub fn with_motion(mut self, motion: ObstacleMotion) -> Self {
        self.motion = motion;
        self
    }

    /// Checks the shape and motion invariants; `pointer` prefixes error locations.
    pub fn validate(&self, pointer: &str) -> Result<()> {
        match &self.shape {
            ObstacleShape::Polygon { vertices } => {
                PolygonFootprint::new(vertices.clone())
                    .map_err(|e| Error::scenario(format!("{pointer}/shape/vertices"), e.to_string()))?;
            }
            ObstacleShape::Disc { center, radius } => {
                if !center.is_finite() {
                    return Err(Error::scenario(format!("{pointer}/shape/center"), "must be finite"));
                }
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::scenario(format!("{pointer}/shape/radius"), "must be positive"));
                }
            }
        }
        if let ObstacleMotion::Trail { waypoints, speed } = &self.motion {
            if waypoints.len() < 2 || waypoints.iter().any(|p| !p.is_finite()) {
                return Err(Error::scenario(
                    format!("{pointer}/motion/waypoints"),
                    "trail needs at least two finite waypoints",
                ));
            }
            if !(*speed >= 0.0) || !speed.is_finite() {
                return Err(Error::scenario(format!("{pointer}/motion/speed"), "must be nonnegative"));
            }
        }
        Ok(())
    }

    /// Displacement of the shape after `time` seconds.
    pub fn offset_at(&self, time: f64) -> Point2 {
        match &self.motion {
            ObstacleMotion::Static => Point2::default(),
            ObstacleMotion::Trail { waypoints, speed } => trail_point(waypoints, speed * time) - waypoints[0],
        }
    }

    /// Shape translated to its position at `time`.
    pub fn shape_at(&self, time: f64) -> PlacedShape {
        let o = self.offset_at(time);
        match &self.shape {
            ObstacleShape::Polygon { vertices } => {
                let mut v: Vec<Point2> = vertices.iter().map(|&p| p + o).collect();
                if signed_area(&v) < 0.0 {
                    v.reverse();
                }
                PlacedShape::Polygon(v)
            }
            ObstacleShape::Disc { center, radius } => PlacedShape::Disc {
                center: *center + o,
                radius: *radius,
            },
        }
    }
}

/// Point at arc length `s` along `waypoints`, ping-ponging between the ends.
pub fn trail_point(waypoints: &[Point2], s: f64) -> Point2 {
    let lengths: Vec<f64> = waypoints.windows(2).map(|w| w[0].distance(w[1])).collect();
    let total: f64 = lengths.iter().sum();
    if total == 0.0 {
        return waypoints[0];
    }
    let mut r = s.rem_euclid(2.0 * total);
    if r > total {
        r = 2.0 * total - r;
    }
    for (w, len) in waypoints.windows(2).zip(&lengths) {
        if r <= *len {
            return w[0] + (w[1] - w[0]) * (r / len);
        }
        r -= len;
    }
    *waypoints.last().unwrap()
}

/// Obstacle geometry at a particular instant; polygons are counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub enum PlacedShape {
    Polygon(Vec<Point2>),
    Disc { center: Point2, radius: f64 },
}

impl PlacedShape {
    /// Boundary points at roughly `spacing` arc length, starting at each vertex.
    pub fn boundary_samples(&self, spacing: f64, out: &mut Vec<Point2>) {
        match self {
            PlacedShape::Polygon(v) => {
                for i in 0..v.len() {
                    let a = v[i];
                    let b = v[(i + 1) % v.len()];
                    let n = (a.distance(b) / spacing).ceil().max(1.0) as usize;
                    for k in 0..n {
                        out.push(a + (b - a) * (k as f64 / n as f64));
                    }
                }
            }
            PlacedShape::Disc { center, radius } => {
                let n = (2.0 * std::f64::consts::PI * radius / spacing).ceil().max(8.0) as usize;
                for k in 0..n {
                    let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    out.push(*center + Point2::new(radius * a.cos(), radius * a.sin()));
                }
            }
        }
    }

    /// Boundary as straight edges; discs use the given chord count.
    pub fn edges(&self, disc_segments: usize) -> Vec<(Point2, Point2)> {
        let loop_: Vec<Point2> = match self {
            PlacedShape::Polygon(v) => v.clone(),
            PlacedShape::Disc { center, radius } => (0..disc_segments)
                .map(|k| {
                    let a = 2.0 * std::f64::consts::PI * k as f64 / disc_segments as f64;
                    *center + Point2::new(radius * a.cos(), radius * a.sin())
                })
                .collect(),
        };
        (0..loop_.len()).map(|i| (loop_[i], loop_[(i + 1) % loop_.len()])).collect()
    }

    /// Whether the shape overlaps the closed polygon `poly` (counter-clockwise).
    pub fn intersects_polygon(&self, poly: &[Point2]) -> bool {
        match self {
            PlacedShape::Disc { center, radius } => ring_contains(poly, *center) || ring_distance(poly, *center) < *radius,
            PlacedShape::Polygon(v) => polygons_intersect(v, poly),
        }
    }
}

/// Edge crossing or mutual containment of two simple polygons.
pub fn polygons_intersect(a: &[Point2], b: &[Point2]) -> bool {
    for i in 0..a.len() {
        let (p, q) = (a[i], a[(i + 1) % a.len()]);
        for j in 0..b.len() {
            if segments_intersect(p, q, b[j], b[(j + 1) % b.len()]) {
                return true;
            }
        }
    }
    ring_contains(a, b[0]) || ring_contains(b, a[0])
}

// Posed outlines are used as given: re-validating them would trip over
// rounding on collinear edges that a rigid transform cannot actually make cross.

/// Ray-cast containment along +x with the half-open crossing rule.
fn ring_contains(ring: &[Point2], p: Point2) -> bool {
    let mut inside = false;
    for i in 0..ring.len() {
        let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
        if (a.y < p.y) != (b.y < p.y) && a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y) > p.x {
            inside = !inside;
        }
    }
    inside
}

fn ring_distance(ring: &[Point2], p: Point2) -> f64 {
    (0..ring.len())
        .map(|i| point_segment_distance(p, ring[i], ring[(i + 1) % ring.len()]))
        .fold(f64::INFINITY, f64::min)
}

/// Shape-level collision between the footprint placed at `pose` and any obstacle.
pub fn ground_truth_collision(footprint: &FootprintSpec, pose: &Pose2, shapes: &[PlacedShape]) -> bool {
    let outlines = footprint.world_outlines(pose);
    shapes
        .iter()
        .any(|s| outlines.iter().any(|o| s.intersects_polygon(o)))
}
