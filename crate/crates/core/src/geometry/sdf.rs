//! Closed-form signed distances: point-to-box, rectangle-cover reduction,
//! point-to-segment and ray-cast signed polygon distance.

use super::footprint::{PolygonFootprint, RectangleCover};
use super::point::Point2;

/// Distances below this are reported as exactly zero.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// Signed distance from `p` to the axis-aligned box at `center` with `half_extent`.
#[inline]
pub fn sd_box(p: Point2, center: Point2, half_extent: [f64; 2]) -> f64 {
    let ax = (p.x - center.x).abs() - half_extent[0];
    let ay = (p.y - center.y).abs() - half_extent[1];
    let (ox, oy) = (ax.max(0.0), ay.max(0.0));
    let outside = (ox * ox + oy * oy).sqrt();
    outside + ax.max(ay).min(0.0)
}

/// Minimum of the per-rectangle box distances.
///
/// Sign-correct everywhere and exact outside the union; inside overlapping
/// rectangles the magnitude can underestimate the true penetration depth.
#[inline]
pub fn sd_rect_cover(p: Point2, cover: &RectangleCover) -> f64 {
    cover
        .rects()
        .iter()
        .map(|r| sd_box(p, r.center, r.half_extent))
        .fold(f64::INFINITY, f64::min)
}

/// Euclidean distance from `p` to the closed segment `[a, b]`.
#[inline]
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let e = b - a;
    let len_sq = e.norm_squared();
    let t = if len_sq > 0.0 {
        ((p - a).dot(e) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + e * t)).norm()
}

/// Ray-cast containment along +x with the half-open crossing rule.
///
/// Points exactly on the boundary may land on either side.
#[inline]
pub fn point_in_polygon(p: Point2, poly: &PolygonFootprint) -> bool {
    let mut inside = false;
    for e in poly.edges() {
        if crosses_ray(p, e.start, e.end) {
            inside = !inside;
        }
    }
    inside
}

#[inline]
fn crosses_ray(p: Point2, a: Point2, b: Point2) -> bool {
    if (a.y < p.y) != (b.y < p.y) {
        let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        x_cross > p.x
    } else {
        false
    }
}

/// Exact signed distance to a simple polygon boundary (negative inside).
#[inline]
pub fn sd_polygon(p: Point2, poly: &PolygonFootprint) -> f64 {
    let mut best_sq = f64::INFINITY;
    let mut inside = false;
    for e in poly.edges() {
        let w = p - e.start;
        let t = (w.dot(e.dir) * e.inv_len_sq).clamp(0.0, 1.0);
        let d = w - e.dir * t;
        let d_sq = d.norm_squared();
        if d_sq < best_sq {
            best_sq = d_sq;
        }
        if crosses_ray(p, e.start, e.end) {
            inside = !inside;
        }
    }
    let dist = best_sq.sqrt();
    if dist < BOUNDARY_EPS {
        0.0
    } else if inside {
        -dist
    } else {
        dist
    }
}
