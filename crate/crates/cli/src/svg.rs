//! Plain-text SVG rendering for episodes and signed-distance fields.

use std::fmt::Write;

use exact_mppi::geometry::{FootprintSpec, Point2, SdfGrid};
use exact_mppi::world::{EpisodeResult, PlacedShape, Scenario};

/// Sim-time spacing of footprint snapshots along a trajectory.
pub const SNAPSHOT_PERIOD: f64 = 0.5;
const EPISODE_PX_PER_M: f64 = 60.0;
const SDF_PX_PER_M: f64 = 240.0;

/// Maps world coordinates (y up) to SVG pixels (y down).
struct Canvas {
    min: Point2,
    max: Point2,
    scale: f64,
    body: String,
}

impl Canvas {
    fn new(min: Point2, max: Point2, scale: f64) -> Self {
        Self {
            min,
            max,
            scale,
            body: String::new(),
        }
    }

    fn x(&self, x: f64) -> f64 {
        (x - self.min.x) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        (self.max.y - y) * self.scale
    }

    fn points(&self, pts: &[Point2]) -> String {
        pts.iter()
            .map(|p| format!("{:.2},{:.2}", self.x(p.x), self.y(p.y)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn polygon(&mut self, pts: &[Point2], style: &str) {
        let pts = self.points(pts);
        writeln!(self.body, r#"<polygon points="{pts}" {style}/>"#).unwrap();
    }

    fn polyline(&mut self, pts: &[Point2], style: &str) {
        let pts = self.points(pts);
        writeln!(self.body, r#"<polyline points="{pts}" fill="none" {style}/>"#).unwrap();
    }

    fn circle(&mut self, c: Point2, r: f64, style: &str) {
        let (x, y) = (self.x(c.x), self.y(c.y));
        writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" {style}/>"#, r * self.scale).unwrap();
    }

    fn finish(self) -> String {
        let w = (self.max.x - self.min.x) * self.scale;
        let h = (self.max.y - self.min.y) * self.scale;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

fn extent(points: impl IntoIterator<Item = Point2>, margin: f64) -> (Point2, Point2) {
    let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in points {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo - Point2::new(margin, margin), hi + Point2::new(margin, margin))
}

fn shape_points(shape: &PlacedShape) -> Vec<Point2> {
    match shape {
        PlacedShape::Polygon(v) => v.clone(),
        PlacedShape::Disc { center, radius } => {
            vec![*center - Point2::new(*radius, *radius), *center + Point2::new(*radius, *radius)]
        }
    }
}

/// Obstacles at t = 0 (and at the end of the run when they move), guidance,
/// the executed path and footprint outlines every [`SNAPSHOT_PERIOD`] seconds.
pub fn episode_svg(scenario: &Scenario, result: &EpisodeResult) -> String {
    let end_time = result.trajectory.last().map_or(0.0, |s| s.t);
    let initial = scenario.shapes_at(0.0);
    let last = scenario.shapes_at(end_time);
    let bounds = extent(
        initial
            .iter()
            .chain(&last)
            .flat_map(shape_points)
            .chain(result.trajectory.iter().map(|s| s.pose.position()))
            .chain([scenario.start.position(), scenario.goal.position()]),
        scenario.footprint.bounding_radius() + 0.3,
    );
    let mut c = Canvas::new(bounds.0, bounds.1, EPISODE_PX_PER_M);
    let moving: Vec<bool> = scenario.obstacles.iter().map(|o| o.offset_at(end_time) != Point2::default()).collect();
    for ((shape, shape_end), moved) in initial.iter().zip(&last).zip(moving) {
        draw_shape(&mut c, shape, r##"fill="#555" fill-opacity="0.85" stroke="#222" stroke-width="1""##);
        if moved {
            draw_shape(&mut c, shape_end, r##"fill="none" stroke="#222" stroke-dasharray="4 3" stroke-width="1""##);
        }
    }
    let guidance = if scenario.guidance.is_empty() {
        vec![scenario.start.position(), scenario.goal.position()]
    } else {
        scenario.guidance.clone()
    };
    c.polyline(&guidance, r##"stroke="#2a9d8f" stroke-width="1.5" stroke-dasharray="6 4""##);
    let mut next_snapshot = 0.0;
    for s in &result.trajectory {
        if s.t + 1e-9 >= next_snapshot {
            for ring in scenario.footprint.world_outlines(&s.pose) {
                c.polygon(&ring, r##"fill="#e76f51" fill-opacity="0.12" stroke="#e76f51" stroke-width="1""##);
            }
            next_snapshot += SNAPSHOT_PERIOD;
        }
    }
    let path: Vec<Point2> = result.trajectory.iter().map(|s| s.pose.position()).collect();
    c.polyline(&path, r##"stroke="#264653" stroke-width="2""##);
    if let Some(last_sample) = result.trajectory.last() {
        for ring in scenario.footprint.world_outlines(&last_sample.pose) {
            c.polygon(&ring, r##"fill="none" stroke="#264653" stroke-width="1.5""##);
        }
    }
    c.circle(scenario.start.position(), 0.08, r##"fill="#264653""##);
    c.circle(scenario.goal.position(), scenario.goal_tolerance.position, r##"fill="none" stroke="#2a9d8f" stroke-width="2""##);
    c.finish()
}

fn draw_shape(c: &mut Canvas, shape: &PlacedShape, style: &str) {
    match shape {
        PlacedShape::Polygon(v) => c.polygon(v, style),
        PlacedShape::Disc { center, radius } => c.circle(*center, *radius, style),
    }
}

/// Zero level set of the sampled field by marching squares over cell centres.
/// A sample counts as inside when its value is negative; each segment joins
/// interpolated sign changes on the edges of one 2×2 block of samples.
pub fn zero_contour(grid: &SdfGrid) -> Vec<[Point2; 2]> {
    let mut segments = Vec::new();
    if grid.rows < 2 || grid.cols < 2 {
        return segments;
    }
    let crossing = |(r0, c0): (usize, usize), (r1, c1): (usize, usize)| {
        let (a, b) = (grid.get(r0, c0), grid.get(r1, c1));
        let (pa, pb) = (grid.cell_center(r0, c0), grid.cell_center(r1, c1));
        let t = (a / (a - b)).clamp(0.0, 1.0);
        pa + (pb - pa) * t
    };
    for r in 0..grid.rows - 1 {
        for col in 0..grid.cols - 1 {
            // Corners counter-clockwise from bottom-left.
            let corners = [(r, col), (r, col + 1), (r + 1, col + 1), (r + 1, col)];
            let inside: Vec<bool> = corners.iter().map(|&(i, j)| grid.get(i, j) < 0.0).collect();
            let edges: Vec<usize> = (0..4).filter(|&e| inside[e] != inside[(e + 1) % 4]).collect();
            let point = |e: usize| crossing(corners[e], corners[(e + 1) % 4]);
            match edges.len() {
                2 => segments.push([point(edges[0]), point(edges[1])]),
                4 => {
                    // Saddle: the block average decides whether the inside corners connect.
                    let mean = corners.iter().map(|&(i, j)| grid.get(i, j)).sum::<f64>() / 4.0;
                    let joined = (mean < 0.0) == inside[0];
                    if joined {
                        segments.push([point(0), point(1)]);
                        segments.push([point(2), point(3)]);
                    } else {
                        segments.push([point(3), point(0)]);
                        segments.push([point(1), point(2)]);
                    }
                }
                _ => {}
            }
        }
    }
    segments
}

/// Diverging colour map: red inside, blue outside, white on the boundary.
fn color(value: f64, scale: f64) -> String {
    let t = (value.abs() / scale).min(1.0);
    let fade = |full: f64| (255.0 - (255.0 - full) * t).round() as u8;
    if value < 0.0 {
        format!("#{:02x}{:02x}{:02x}", fade(178.0), fade(24.0), fade(43.0))
    } else {
        format!("#{:02x}{:02x}{:02x}", fade(33.0), fade(102.0), fade(172.0))
    }
}

/// Colour-mapped field with the zero contour and the footprint outline.
pub fn sdf_svg(grid: &SdfGrid, footprint: &FootprintSpec) -> String {
    let mut c = Canvas::new(grid.bounds.min, grid.bounds.max, SDF_PX_PER_M);
    let extreme = |keep: fn(&f64) -> bool| grid.values.iter().copied().filter(keep).fold(1e-12f64, |m, v| m.max(v.abs()));
    let (inside_scale, outside_scale) = (extreme(|v| *v < 0.0), extreme(|v| *v >= 0.0));
    let px = grid.resolution * SDF_PX_PER_M;
    c.body.push_str("<g shape-rendering=\"crispEdges\">\n");
    for r in 0..grid.rows {
        for col in 0..grid.cols {
            let centre = grid.cell_center(r, col);
            let (x, y) = (c.x(centre.x) - px / 2.0, c.y(centre.y) - px / 2.0);
            let v = grid.get(r, col);
            let fill = color(v, if v < 0.0 { inside_scale } else { outside_scale });
            writeln!(c.body, r#"<rect x="{x:.2}" y="{y:.2}" width="{px:.2}" height="{px:.2}" fill="{fill}"/>"#).unwrap();
        }
    }
    c.body.push_str("</g>\n");
    for ring in footprint.outlines() {
        c.polygon(&ring, r##"fill="none" stroke="#888" stroke-width="1" stroke-dasharray="3 3""##);
    }
    for [a, b] in zero_contour(grid) {
        c.polyline(&[a, b], r##"stroke="black" stroke-width="2""##);
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use exact_mppi::geometry::{sdf_grid, Bounds};

    fn l_shape() -> FootprintSpec {
        let v = [[-1.0, -1.0], [1.0, -1.0], [1.0, -0.6], [-0.6, -0.6], [-0.6, 1.0], [-1.0, 1.0]];
        FootprintSpec::polygon("L", v.iter().map(|&p| p.into()).collect()).unwrap()
    }

    #[test]
    fn contour_separates_inside_and_outside_cells() {
        let fp = l_shape();
        let grid = sdf_grid(&fp, Bounds::new(Point2::new(-1.5, -1.5), Point2::new(1.5, 1.5)), 0.05).unwrap();
        for r in 0..grid.rows {
            for col in 0..grid.cols {
                let v = grid.get(r, col);
                if v != 0.0 {
                    assert_eq!(v < 0.0, fp.contains(grid.cell_center(r, col)));
                }
            }
        }
        let segments = zero_contour(&grid);
        assert!(!segments.is_empty());
        // Every contour point lies between an inside and an outside neighbouring sample.
        for p in segments.iter().flatten() {
            let col = ((p.x - grid.bounds.min.x) / grid.resolution - 0.5).floor() as usize;
            let r = ((p.y - grid.bounds.min.y) / grid.resolution - 0.5).floor() as usize;
            let block = [(r, col), (r, col + 1), (r + 1, col), (r + 1, col + 1)];
            let inside = block.iter().filter(|&&(i, j)| grid.get(i, j) < 0.0).count();
            assert!((1..4).contains(&inside), "{p:?}");
        }
        // Closed curve: every endpoint is shared by exactly two segments.
        let key = |p: &Point2| ((p.x * 1e9).round() as i64, (p.y * 1e9).round() as i64);
        let mut counts = std::collections::HashMap::new();
        for p in segments.iter().flatten() {
            *counts.entry(key(p)).or_insert(0) += 1;
        }
        assert!(counts.values().all(|&n| n == 2));
    }

    #[test]
    fn sdf_svg_is_well_formed() {
        let fp = l_shape();
        let grid = sdf_grid(&fp, Bounds::new(Point2::new(-1.5, -1.5), Point2::new(1.5, 1.5)), 0.1).unwrap();
        let svg = sdf_svg(&grid, &fp);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<rect x=").count(), grid.rows * grid.cols);
    }
}
