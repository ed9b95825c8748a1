//! Fixed-capacity obstacle point arrays with a validity mask.

use super::point::{Point2, Pose2};

/// Coordinates stored in masked-out slots. Reductions read the mask, never this value.
pub const PAD_POINT: Point2 = Point2::new(1e9, 1e9);

/// Clearance reported when no valid point is present.
pub const DEFAULT_EMPTY_CLEARANCE: f64 = 1e6;

/// `N` planar points, of which those with `mask[i] == true` are observations.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleSet {
    points: Vec<Point2>,
    mask: Vec<bool>,
}

impl ObstacleSet {
    /// An all-padding set of the given capacity.
    pub fn empty(capacity: usize) -> Self {
        Self {
            points: vec![PAD_POINT; capacity],
            mask: vec![false; capacity],
        }
    }

    /// Fills the first slots with `points` (non-finite points are dropped) and pads
    /// the rest. Points beyond `capacity` are discarded.
    pub fn from_points(points: &[Point2], capacity: usize) -> Self {
        let mut set = Self::empty(capacity);
        let mut slot = 0;
        for &p in points.iter().filter(|p| p.is_finite()) {
            if slot == capacity {
                log::debug!("obstacle set full; dropping {} points", points.len() - slot);
                break;
            }
            set.points[slot] = p;
            set.mask[slot] = true;
            slot += 1;
        }
        set
    }

    pub fn capacity(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.valid_count() == 0
    }

    pub fn iter_valid(&self) -> impl Iterator<Item = Point2> + '_ {
        self.points.iter().zip(&self.mask).filter(|(_, &m)| m).map(|(&p, _)| p)
    }

    /// Packs the valid points contiguously; used by hot loops that do not
    /// want to branch on the mask.
    pub fn valid_points(&self) -> Vec<Point2> {
        self.iter_valid().collect()
    }

    /// Re-expresses every valid point in the body frame at `pose`. Padding stays padding.
    pub fn transform_to_body(&self, pose: &Pose2) -> ObstacleSet {
        let points = self
            .points
            .iter()
            .zip(&self.mask)
            .map(|(&p, &m)| if m { pose.inverse_transform_point(p) } else { PAD_POINT })
            .collect();
        ObstacleSet {
            points,
            mask: self.mask.clone(),
        }
    }
}

/// Free-function form of [`ObstacleSet::transform_to_body`].
pub fn transform_to_body(points: &ObstacleSet, pose: &Pose2) -> ObstacleSet {
    points.transform_to_body(pose)
}
