use exact_mppi::geometry::{point_in_polygon, sd_polygon, FootprintShape, Point2};
use exact_mppi_bench::{load_footprints, oracle_sd_polygon, query_batch, winding_number, BenchFootprint};

fn gallery() -> Vec<BenchFootprint> {
    load_footprints(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/footprints")).unwrap()
}

#[test]
fn gallery_has_seven_polygons() {
    assert_eq!(gallery().iter().filter(|f| f.polygon.is_some()).count(), 7);
}

#[test]
fn winding_sign_matches_ray_cast_containment() {
    for fp in gallery() {
        let spec = fp.polygon.unwrap();
        let FootprintShape::Polygon(poly) = spec.shape() else { unreachable!() };
        // Queries concentrated around the shape so both answers are exercised.
        for q in query_batch(21, 10_000).iter().map(|q| *q * 0.06) {
            if sd_polygon(q, poly).abs() < 1e-9 {
                continue;
            }
            assert_eq!(winding_number(q, poly.vertices()) != 0, point_in_polygon(q, poly), "{} at {:?}", fp.name, q);
        }
    }
}

#[test]
fn oracle_error_halves_when_sampling_doubles() {
    for fp in gallery().into_iter().filter(|f| ["L", "star"].contains(&f.name.as_str())) {
        let spec = fp.polygon.unwrap();
        let FootprintShape::Polygon(poly) = spec.shape() else { unreachable!() };
        let queries: Vec<Point2> = query_batch(5, 10_000).iter().map(|q| *q * 0.08).collect();
        let max_err = |samples: usize| {
            queries
                .iter()
                .map(|&q| (oracle_sd_polygon(q, poly.vertices(), samples) - sd_polygon(q, poly)).abs())
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (max_err(50), max_err(100));
        let ratio = fine / coarse;
        assert!((0.4..=0.6).contains(&ratio), "{}: {coarse} -> {fine} (ratio {ratio})", fp.name);
    }
}
