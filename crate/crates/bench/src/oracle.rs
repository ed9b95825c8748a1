use exact_mppi::geometry::Point2;

/// Winding number of the closed ring around `p` by summing the signed angles
/// each edge subtends. Points on the boundary are not meaningful here.
pub fn winding_number(p: Point2, ring: &[Point2]) -> i64 {
    let n = ring.len();
    let total: f64 = (0..n)
        .map(|i| {
            let a = ring[i] - p;
            let b = ring[(i + 1) % n] - p;
            a.cross(b).atan2(a.dot(b))
        })
        .sum();
    (total / std::f64::consts::TAU).round() as i64
}

/// Brute-force signed distance: sign from the winding number, magnitude from
/// the nearest of `samples_per_edge` evenly spaced points on every edge
/// (both endpoints included).
pub fn oracle_sd_polygon(p: Point2, ring: &[Point2], samples_per_edge: usize) -> f64 {
    assert!(samples_per_edge >= 2, "need at least two samples per edge");
    let n = ring.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = ring[i];
        let e = ring[(i + 1) % n] - a;
        for k in 0..samples_per_edge {
            let t = k as f64 / (samples_per_edge - 1) as f64;
            best = best.min(p.distance(a + e * t));
        }
    }
    if winding_number(p, ring) != 0 {
        -best
    } else {
        best
    }
}
