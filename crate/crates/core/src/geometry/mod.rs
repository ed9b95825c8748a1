//! Planar geometry: footprints, exact signed distances, obstacle point sets,
//! directional width and signed-distance grids.

mod footprint;
mod grid;
mod hull;
mod obstacles;
mod point;
mod sdf;

pub use footprint::{
    segments_intersect, signed_area, FootprintFile, FootprintKind, FootprintShape, FootprintSpec, PolygonFootprint,
    Rect, RectangleCover,
};
pub use grid::PointGrid;
pub use hull::convex_hull;
pub use obstacles::{transform_to_body, ObstacleSet, DEFAULT_EMPTY_CLEARANCE, PAD_POINT};
pub use point::{wrap_angle, Point2, Pose2};
pub use sdf::{point_in_polygon, point_segment_distance, sd_box, sd_polygon, sd_rect_cover, BOUNDARY_EPS};

use crate::error::{Error, Result};

/// Minimum signed distance over the valid body-frame points, or `empty_value`
/// when the mask holds no valid point.
pub fn min_signed_distance_with(footprint: &FootprintSpec, body_points: &ObstacleSet, empty_value: f64) -> f64 {
    body_points
        .iter_valid()
        .map(|p| footprint.signed_distance(p))
        .reduce(f64::min)
        .unwrap_or(empty_value)
}

/// [`min_signed_distance_with`] using the default empty-set clearance of 10⁶ m.
pub fn min_signed_distance(footprint: &FootprintSpec, body_points: &ObstacleSet) -> f64 {
    min_signed_distance_with(footprint, body_points, DEFAULT_EMPTY_CLEARANCE)
}

/// Conservative bounds used to skip points that cannot lower a running minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CullBounds {
    /// Radius of the origin-centered disc containing the footprint.
    pub radius: f64,
    /// Body-frame axis-aligned bounding box.
    pub aabb: Rect,
}

impl CullBounds {
    pub fn of(footprint: &FootprintSpec) -> Self {
        let pts = footprint.support_points();
        let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in &pts {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        Self {
            radius: footprint.bounding_radius(),
            aabb: Rect::new((lo + hi) * 0.5, [(hi.x - lo.x) / 2.0, (hi.y - lo.y) / 2.0]),
        }
    }
}

/// Minimum signed distance between the footprint placed at `pose` and packed
/// world-frame points. Fuses the body-frame transform with the reduction.
///
/// A point is skipped when it is at least `best + radius` from the pose, or
/// when its distance to the bounding box is already `≥ best`; both are lower
/// bounds on its signed distance, so the result is unchanged.
#[inline]
pub fn min_signed_distance_at_pose(
    footprint: &FootprintSpec,
    cull: &CullBounds,
    world_points: &[Point2],
    pose: &Pose2,
    empty_value: f64,
) -> f64 {
    let (s, c) = pose.theta.sin_cos();
    let mut best = empty_value;
    let (bc, bh) = (cull.aabb.center, cull.aabb.half_extent);
    for o in world_points {
        let dx = o.x - pose.x;
        let dy = o.y - pose.y;
        let reach = best + cull.radius;
        if reach > 0.0 && dx * dx + dy * dy >= reach * reach {
            continue;
        }
        let p = Point2::new(c * dx + s * dy, -s * dx + c * dy);
        if best > 0.0 {
            let ax = ((p.x - bc.x).abs() - bh[0]).max(0.0);
            let ay = ((p.y - bc.y).abs() - bh[1]).max(0.0);
            if ax * ax + ay * ay >= best * best {
                continue;
            }
        }
        let d = footprint.signed_distance(p);
        if d < best {
            best = d;
        }
    }
    best
}

/// Extent of the footprint's projection onto the unit direction `n`.
pub fn directional_width(footprint: &FootprintSpec, n: Point2) -> Result<f64> {
    if !n.is_finite() || (n.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "direction ({}, {}) is not a unit vector",
            n.x, n.y
        )));
    }
    let (lo, hi) = footprint
        .support_points()
        .iter()
        .map(|p| p.dot(n))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok(hi - lo)
}

/// Smallest directional width over all directions, attained at a hull edge normal.
pub fn minimum_width(footprint: &FootprintSpec) -> f64 {
    let hull = convex_hull(&footprint.support_points());
    let n = hull.len();
    (0..n)
        .map(|i| {
            let e = hull[(i + 1) % n] - hull[i];
            let normal = Point2::new(-e.y, e.x) * (1.0 / e.norm());
            directional_width(footprint, normal).expect("normalized")
        })
        .fold(f64::INFINITY, f64::min)
}

/// Axis-aligned rectangle given by its corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Point2,
    pub max: Point2,
}

impl Bounds {
    pub fn new(min: Point2, max: Point2) -> Self {
        Self { min, max }
    }

    pub fn is_empty(&self) -> bool {
        !(self.max.x > self.min.x && self.max.y > self.min.y)
    }
}

/// Default cell cap for [`sdf_grid`].
pub const DEFAULT_GRID_CELL_CAP: usize = 4_000_000;

/// Signed distances sampled at cell centers, row-major with rows along +y.
#[derive(Debug, Clone, PartialEq)]
pub struct SdfGrid {
    pub bounds: Bounds,
    pub resolution: f64,
    pub cols: usize,
    pub rows: usize,
    pub values: Vec<f64>,
}

impl SdfGrid {
    pub fn cell_center(&self, row: usize, col: usize) -> Point2 {
        Point2::new(
            self.bounds.min.x + (col as f64 + 0.5) * self.resolution,
            self.bounds.min.y + (row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }
}

pub fn sdf_grid(footprint: &FootprintSpec, bounds: Bounds, resolution: f64) -> Result<SdfGrid> {
    sdf_grid_capped(footprint, bounds, resolution, DEFAULT_GRID_CELL_CAP)
}

pub fn sdf_grid_capped(footprint: &FootprintSpec, bounds: Bounds, resolution: f64, cap: usize) -> Result<SdfGrid> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::InvalidArgument(format!("resolution {resolution} must be positive")));
    }
    if bounds.is_empty() {
        return Err(Error::InvalidArgument("grid bounds are empty".into()));
    }
    let cols = ((bounds.max.x - bounds.min.x) / resolution).ceil() as usize;
    let rows = ((bounds.max.y - bounds.min.y) / resolution).ceil() as usize;
    let cells = cols.saturating_mul(rows);
    if cells > cap {
        return Err(Error::GridTooLarge { cells, cap });
    }
    let mut grid = SdfGrid {
        bounds,
        resolution,
        cols,
        rows,
        values: Vec::with_capacity(cells),
    };
    for r in 0..rows {
        for c in 0..cols {
            let p = grid.cell_center(r, c);
            grid.values.push(footprint.signed_distance(p));
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn unit_square() -> FootprintSpec {
        FootprintSpec::polygon(
            "unit-square",
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(0.0, 1.0),
            ],
        )
        .unwrap()
    }

    fn l_shape() -> FootprintSpec {
        FootprintSpec::polygon(
            "L",
            [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]
                .iter()
                .map(|&p| p.into())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn min_signed_distance_examples() {
        let sq = unit_square();
        let set = ObstacleSet::from_points(&[Point2::new(2.0, 0.0), Point2::new(0.0, 3.0)], 4);
        assert_relative_eq!(min_signed_distance(&sq, &set), 1.0);
        let set = ObstacleSet::from_points(&[Point2::new(0.5, 0.5), Point2::new(5.0, 5.0)], 4);
        assert_relative_eq!(min_signed_distance(&sq, &set), -0.5);
        assert_eq!(min_signed_distance(&sq, &ObstacleSet::empty(8)), 1e6);
    }

    #[test]
    fn fused_pose_reduction_matches_two_step() {
        let sq = unit_square();
        let pts = [Point2::new(2.0, 0.3), Point2::new(-0.4, 1.7), Point2::new(0.9, 0.1)];
        let set = ObstacleSet::from_points(&pts, 5);
        let pose = Pose2::new(0.4, -0.2, 0.8);
        let two_step = min_signed_distance(&sq, &set.transform_to_body(&pose));
        let fused = min_signed_distance_at_pose(&sq, &CullBounds::of(&sq), &pts, &pose, 1e6);
        assert_relative_eq!(two_step, fused, epsilon = 1e-12);
    }

    #[test]
    fn width_examples() {
        let sq = unit_square();
        assert_relative_eq!(directional_width(&sq, Point2::new(0.0, 1.0)).unwrap(), 1.0);
        let diag = directional_width(&sq, Point2::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).unwrap();
        assert_relative_eq!(diag, 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(directional_width(&l_shape(), Point2::new(1.0, 0.0)).unwrap(), 2.0);
        assert!(directional_width(&sq, Point2::new(1.0, 1.0)).is_err());
    }

    #[test]
    fn minimum_width_of_square_is_side() {
        assert_relative_eq!(minimum_width(&unit_square()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_examples() {
        let sq = unit_square();
        let b = Bounds::new(Point2::new(-1.0, -1.0), Point2::new(2.0, 2.0));
        let g = sdf_grid(&sq, b, 1.5).unwrap();
        assert_eq!((g.rows, g.cols), (2, 2));
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(g.get(r, c), sq.signed_distance(g.cell_center(r, c)));
            }
        }
        let single = sdf_grid(&sq, Bounds::new(Point2::new(0.25, 0.25), Point2::new(0.75, 0.75)), 0.5).unwrap();
        assert_eq!(single.values, vec![-0.5]);
        assert!(sdf_grid(&sq, Bounds::new(Point2::new(1.0, 0.0), Point2::new(1.0, 1.0)), 0.1).is_err());
        assert!(matches!(
            sdf_grid_capped(&sq, b, 0.001, 1000),
            Err(Error::GridTooLarge { .. })
        ));
    }
}
