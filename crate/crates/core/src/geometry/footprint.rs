//! Body-frame robot footprints: rectangle covers and simple polygons.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::hull::convex_hull;
use super::point::{Point2, Pose2};
use super::sdf;
use crate::error::{Error, Result};

/// Axis-aligned body-frame rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub center: Point2,
    pub half_extent: [f64; 2],
}

impl Rect {
    pub fn new(center: Point2, half_extent: [f64; 2]) -> Self {
        Self { center, half_extent }
    }

    /// Corners in counter-clockwise order starting at the lower-left.
    pub fn corners(&self) -> [Point2; 4] {
        let [hx, hy] = self.half_extent;
        let c = self.center;
        [
            Point2::new(c.x - hx, c.y - hy),
            Point2::new(c.x + hx, c.y - hy),
            Point2::new(c.x + hx, c.y + hy),
            Point2::new(c.x - hx, c.y + hy),
        ]
    }
}

/// Union of axis-aligned rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct RectangleCover {
    rects: Vec<Rect>,
}

impl RectangleCover {
    pub fn new(rects: Vec<Rect>) -> Result<Self> {
        if rects.is_empty() {
            return Err(Error::Footprint("rectangle cover is empty".into()));
        }
        for (i, r) in rects.iter().enumerate() {
            if !r.center.is_finite() {
                return Err(Error::Footprint(format!("rectangle {i} has a non-finite center")));
            }
            if !(r.half_extent[0] > 0.0 && r.half_extent[1] > 0.0)
                || !r.half_extent.iter().all(|h| h.is_finite())
            {
                return Err(Error::Footprint(format!(
                    "rectangle {i} half-extent {:?} must be strictly positive",
                    r.half_extent
                )));
            }
        }
        Ok(Self { rects })
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }
}

/// Precomputed edge data for the point-to-segment loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Edge {
    pub start: Point2,
    pub end: Point2,
    pub dir: Point2,
    pub inv_len_sq: f64,
}

/// Simple polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonFootprint {
    vertices: Vec<Point2>,
    edges: Vec<Edge>,
}

impl PolygonFootprint {
    /// Validates the vertex loop. Clockwise input is reversed with a warning.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Footprint(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::Footprint(format!("vertex {i} is not finite")));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::Footprint(format!("edge {i} has zero length")));
            }
        }
        if let Some((a, b)) = first_self_intersection(&vertices) {
            return Err(Error::Footprint(format!("edges {a} and {b} intersect; polygon is not simple")));
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(Error::Footprint("polygon has zero area".into()));
        }
        if area < 0.0 {
            log::warn!("polygon vertices are clockwise; reversing to counter-clockwise");
            vertices.reverse();
        }
        let edges = build_edges(&vertices);
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub(crate) fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len();
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a2 = 0.0;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let w = p.cross(q);
            a2 += w;
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        Point2::new(cx / (3.0 * a2), cy / (3.0 * a2))
    }
}

fn build_edges(vertices: &[Point2]) -> Vec<Edge> {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let start = vertices[i];
            let end = vertices[(i + 1) % n];
            let dir = end - start;
            Edge {
                start,
                end,
                dir,
                inv_len_sq: 1.0 / dir.norm_squared(),
            }
        })
        .collect()
}

/// Shoelace area, positive for counter-clockwise loops.
pub fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum::<f64>()
}

fn orientation(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, touching and collinear overlap included.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

fn first_self_intersection(vertices: &[Point2]) -> Option<(usize, usize)> {
    let n = vertices.len();
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if adjacent {
                // Adjacent edges share one vertex; they may only overlap if
                // they fold back onto each other.
                let shared = if j == i + 1 { b } else { a };
                let (p, q) = if j == i + 1 { (a, d) } else { (b, c) };
                if orientation(shared, p, q) == 0.0 && (p - shared).dot(q - shared) > 0.0 {
                    return Some((i, j));
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Inner representation of a footprint.
#[derive(Debug, Clone, PartialEq)]
pub enum FootprintShape {
    Rectangles(RectangleCover),
    Polygon(PolygonFootprint),
}

/// Named robot collision geometry in the body frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FootprintSpec {
    name: String,
    shape: FootprintShape,
}

impl FootprintSpec {
    pub fn new(name: impl Into<String>, shape: FootprintShape) -> Self {
        Self {
            name: name.into(),
            shape,
        }
    }

    pub fn polygon(name: impl Into<String>, vertices: Vec<Point2>) -> Result<Self> {
        Ok(Self::new(name, FootprintShape::Polygon(PolygonFootprint::new(vertices)?)))
    }

    pub fn rectangles(name: impl Into<String>, rects: Vec<Rect>) -> Result<Self> {
        Ok(Self::new(name, FootprintShape::Rectangles(RectangleCover::new(rects)?)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> &FootprintShape {
        &self.shape
    }

    /// Signed distance from a body-frame point, dispatching on the representation.
    #[inline]
    pub fn signed_distance(&self, p: Point2) -> f64 {
        match &self.shape {
            FootprintShape::Rectangles(cover) => sdf::sd_rect_cover(p, cover),
            FootprintShape::Polygon(poly) => sdf::sd_polygon(p, poly),
        }
    }

    /// Whether a body-frame point lies inside the footprint.
    pub fn contains(&self, p: Point2) -> bool {
        match &self.shape {
            FootprintShape::Rectangles(cover) => cover.rects().iter().any(|r| {
                (p.x - r.center.x).abs() < r.half_extent[0] && (p.y - r.center.y).abs() < r.half_extent[1]
            }),
            FootprintShape::Polygon(poly) => sdf::point_in_polygon(p, poly),
        }
    }

    /// Vertices whose projections bound the footprint in every direction.
    pub fn support_points(&self) -> Vec<Point2> {
        match &self.shape {
            FootprintShape::Rectangles(cover) => cover.rects().iter().flat_map(|r| r.corners()).collect(),
            FootprintShape::Polygon(poly) => poly.vertices().to_vec(),
        }
    }

    /// Closed outlines in the body frame: the polygon itself, or one loop per rectangle.
    pub fn outlines(&self) -> Vec<Vec<Point2>> {
        match &self.shape {
            FootprintShape::Rectangles(cover) => cover.rects().iter().map(|r| r.corners().to_vec()).collect(),
            FootprintShape::Polygon(poly) => vec![poly.vertices().to_vec()],
        }
    }

    /// Outlines placed at `pose` in the world frame.
    pub fn world_outlines(&self, pose: &Pose2) -> Vec<Vec<Point2>> {
        self.outlines()
            .into_iter()
            .map(|loop_| loop_.into_iter().map(|p| pose.transform_point(p)).collect())
            .collect()
    }

    /// Radius of the smallest origin-centered disc containing the footprint.
    pub fn bounding_radius(&self) -> f64 {
        self.support_points().iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// The convex hull as a polygon footprint named `<name>-hull`.
    pub fn convex_hull(&self) -> FootprintSpec {
        let hull = convex_hull(&self.support_points());
        let poly = PolygonFootprint::new(hull).expect("hull of a valid footprint is a simple polygon");
        FootprintSpec::new(format!("{}-hull", self.name), FootprintShape::Polygon(poly))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: FootprintFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_file(&self) -> FootprintFile {
        match &self.shape {
            FootprintShape::Rectangles(cover) => FootprintFile {
                name: self.name.clone(),
                kind: FootprintKind::Rectangles,
                rectangles: Some(cover.rects().to_vec()),
                vertices: None,
            },
            FootprintShape::Polygon(poly) => FootprintFile {
                name: self.name.clone(),
                kind: FootprintKind::Polygon,
                rectangles: None,
                vertices: Some(poly.vertices().to_vec()),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FootprintKind {
    Rectangles,
    Polygon,
}

/// On-disk footprint schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FootprintFile {
    pub name: String,
    pub kind: FootprintKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rectangles: Option<Vec<Rect>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Point2>>,
}

impl TryFrom<FootprintFile> for FootprintSpec {
    type Error = Error;

    fn try_from(file: FootprintFile) -> Result<Self> {
        match file.kind {
            FootprintKind::Rectangles => {
                let rects = file
                    .rectangles
                    .ok_or_else(|| Error::Footprint("kind `rectangles` requires a `rectangles` array".into()))?;
                FootprintSpec::rectangles(file.name, rects)
            }
            FootprintKind::Polygon => {
                let vertices = file
                    .vertices
                    .ok_or_else(|| Error::Footprint("kind `polygon` requires a `vertices` array".into()))?;
                FootprintSpec::polygon(file.name, vertices)
            }
        }
    }
}

impl Serialize for FootprintSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FootprintSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = FootprintFile::deserialize(deserializer)?;
        FootprintSpec::try_from(file).map_err(serde::de::Error::custom)
    }
}
