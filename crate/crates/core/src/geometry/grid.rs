//! Uniform bucket grid over world-frame points for clearance queries that
//! visit cells nearest-first and stop once no farther cell can matter.

use super::footprint::FootprintSpec;
use super::point::{Point2, Pose2};
use super::CullBounds;

#[derive(Debug, Clone, PartialEq)]
pub struct PointGrid {
    origin: Point2,
    cell: f64,
    cols: i64,
    rows: i64,
    /// Offsets into `points` per cell, row-major, with a trailing sentinel.
    starts: Vec<usize>,
    points: Vec<Point2>,
}

impl PointGrid {
    /// Buckets finite `points` into square cells of side `cell`.
    pub fn new(points: &[Point2], cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "cell size must be positive");
        let pts: Vec<Point2> = points.iter().copied().filter(|p| p.is_finite()).collect();
        if pts.is_empty() {
            return Self {
                origin: Point2::new(0.0, 0.0),
                cell,
                cols: 0,
                rows: 0,
                starts: vec![0],
                points: Vec::new(),
            };
        }
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for p in &pts {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let cols = ((hi.x - lo.x) / cell).floor() as i64 + 1;
        let rows = ((hi.y - lo.y) / cell).floor() as i64 + 1;
        let index = |p: &Point2| {
            let i = (((p.x - lo.x) / cell).floor() as i64).clamp(0, cols - 1);
            let j = (((p.y - lo.y) / cell).floor() as i64).clamp(0, rows - 1);
            (j * cols + i) as usize
        };
        let mut counts = vec![0usize; (cols * rows) as usize + 1];
        for p in &pts {
            counts[index(p) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let mut fill = counts.clone();
        let mut sorted = vec![Point2::new(0.0, 0.0); pts.len()];
        for p in &pts {
            let k = index(p);
            sorted[fill[k]] = *p;
            fill[k] += 1;
        }
        Self {
            origin: lo,
            cell,
            cols,
            rows,
            starts: counts,
            points: sorted,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same value as [`super::min_signed_distance_at_pose`] over the stored points.
    pub fn min_signed_distance_at_pose(&self, footprint: &FootprintSpec, cull: &CullBounds, pose: &Pose2, empty_value: f64) -> f64 {
        if self.points.is_empty() {
            return empty_value;
        }
        let ci = ((pose.x - self.origin.x) / self.cell).floor() as i64;
        let cj = ((pose.y - self.origin.y) / self.cell).floor() as i64;
        // Chebyshev ring that still contains a grid cell.
        let far = [ci, self.cols - 1 - ci, cj, self.rows - 1 - cj]
            .into_iter()
            .map(|d| d.unsigned_abs() as i64)
            .max()
            .unwrap_or(0);
        let (s, c) = pose.theta.sin_cos();
        let (bc, bh) = (cull.aabb.center, cull.aabb.half_extent);
        let mut best = empty_value;
        let visit = |k: usize, best: &mut f64| {
            for o in &self.points[self.starts[k]..self.starts[k + 1]] {
                let dx = o.x - pose.x;
                let dy = o.y - pose.y;
                let reach = *best + cull.radius;
                if reach > 0.0 && dx * dx + dy * dy >= reach * reach {
                    continue;
                }
                let p = Point2::new(c * dx + s * dy, -s * dx + c * dy);
                if *best > 0.0 {
                    let ax = ((p.x - bc.x).abs() - bh[0]).max(0.0);
                    let ay = ((p.y - bc.y).abs() - bh[1]).max(0.0);
                    if ax * ax + ay * ay >= *best * *best {
                        continue;
                    }
                }
                let d = footprint.signed_distance(p);
                if d < *best {
                    *best = d;
                }
            }
        };
        for r in 0..=far {
            // Every cell of ring r is at least (r − 1) cells away from the pose.
            if r >= 1 && ((r - 1) as f64) * self.cell >= best + cull.radius {
                break;
            }
            let (j0, j1) = ((cj - r).max(0), (cj + r).min(self.rows - 1));
            for j in j0..=j1 {
                let edge_row = j == cj - r || j == cj + r;
                let step = if edge_row { 1 } else { 2 * r.max(1) };
                let mut i = ci - r;
                while i <= ci + r {
                    if i >= 0 && i < self.cols {
                        visit((j * self.cols + i) as usize, &mut best);
                    }
                    i += step;
                }
            }
        }
        best
    }
}
