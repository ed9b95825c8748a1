use exact_mppi_bench::{load_footprints, scaling_benchmark, EvaluatorKind};

#[test]
fn small_sweep_is_ordered_and_complete() {
    let footprints = load_footprints(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/footprints")).unwrap();
    let counts = [100, 1_000, 10_000];
    let report = scaling_benchmark(&footprints, &counts, 3, 1, 0).unwrap();
    let with_cover = footprints.iter().filter(|f| f.cover.is_some()).count();
    assert_eq!(report.rows.len(), (footprints.len() + with_cover) * counts.len());
    for fp in &footprints {
        for kind in EvaluatorKind::ALL {
            let seen: Vec<usize> = report
                .rows
                .iter()
                .filter(|r| r.footprint == fp.name && r.evaluator == kind)
                .map(|r| r.queries)
                .collect();
            if fp.evaluator(kind).is_some() {
                assert_eq!(seen, counts);
            } else {
                assert!(seen.is_empty());
            }
        }
    }
    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "footprint,evaluator,queries,trials,mean_us,std_us,median_us,threads");
    assert_eq!(text.lines().count(), report.rows.len() + 1);
}
