use std::collections::BTreeMap;
use std::hint::black_box;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use exact_mppi::geometry::{sd_polygon, sd_rect_cover, FootprintShape, FootprintSpec, Point2};
use exact_mppi::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Queries are drawn uniformly from `[-QUERY_HALF_SPAN, QUERY_HALF_SPAN]²`.
pub const QUERY_HALF_SPAN: f64 = 25.0;
const WARMUP: usize = 3;
const PAR_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluatorKind {
    PolygonEdge,
    RectCover,
}

impl EvaluatorKind {
    pub const ALL: [EvaluatorKind; 2] = [EvaluatorKind::PolygonEdge, EvaluatorKind::RectCover];

    pub fn as_str(self) -> &'static str {
        match self {
            EvaluatorKind::PolygonEdge => "polygon_edge",
            EvaluatorKind::RectCover => "rect_cover",
        }
    }
}

/// A named shape with whichever representations are available.
#[derive(Debug, Clone)]
pub struct BenchFootprint {
    pub name: String,
    pub polygon: Option<FootprintSpec>,
    pub cover: Option<FootprintSpec>,
}

impl BenchFootprint {
    pub fn evaluator(&self, kind: EvaluatorKind) -> Option<&FootprintSpec> {
        match kind {
            EvaluatorKind::PolygonEdge => self.polygon.as_ref(),
            EvaluatorKind::RectCover => self.cover.as_ref(),
        }
    }
}

/// Loads every `*.json` footprint in `dir`, pairing polygon and rectangle
/// files that share a `name`. Sorted by name.
pub fn load_footprints(dir: impl AsRef<Path>) -> Result<Vec<BenchFootprint>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir.as_ref())?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    let mut by_name: BTreeMap<String, BenchFootprint> = BTreeMap::new();
    for path in paths {
        let fp = FootprintSpec::load(&path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        let entry = by_name.entry(fp.name().to_string()).or_insert_with(|| BenchFootprint {
            name: fp.name().to_string(),
            polygon: None,
            cover: None,
        });
        let slot = match fp.shape() {
            FootprintShape::Polygon(_) => &mut entry.polygon,
            FootprintShape::Rectangles(_) => &mut entry.cover,
        };
        if slot.is_some() {
            return Err(Error::InvalidArgument(format!(
                "{}: second footprint named `{}` of the same kind",
                path.display(),
                fp.name()
            )));
        }
        *slot = Some(fp);
    }
    Ok(by_name.into_values().collect())
}

/// Seed-reproducible batch of `count` query points.
pub fn query_batch(seed: u64, count: usize) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Point2::new(
                rng.random_range(-QUERY_HALF_SPAN..QUERY_HALF_SPAN),
                rng.random_range(-QUERY_HALF_SPAN..QUERY_HALF_SPAN),
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub footprint: String,
    pub evaluator: EvaluatorKind,
    pub queries: usize,
    pub trials: usize,
    pub mean_us: f64,
    pub std_us: f64,
    pub median_us: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn find(&self, footprint: &str, evaluator: EvaluatorKind, queries: usize, threads: usize) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.footprint == footprint && r.evaluator == evaluator && r.queries == queries && r.threads == threads)
    }
}

fn evaluate(footprint: &FootprintSpec, queries: &[Point2], out: &mut [f64]) {
    match footprint.shape() {
        FootprintShape::Polygon(poly) => {
            for (o, &q) in out.iter_mut().zip(queries) {
                *o = sd_polygon(q, poly);
            }
        }
        FootprintShape::Rectangles(cover) => {
            for (o, &q) in out.iter_mut().zip(queries) {
                *o = sd_rect_cover(q, cover);
            }
        }
    }
}

fn evaluate_parallel(footprint: &FootprintSpec, queries: &[Point2], out: &mut [f64]) {
    out.par_chunks_mut(PAR_CHUNK)
        .zip(queries.par_chunks(PAR_CHUNK))
        .for_each(|(o, q)| evaluate(footprint, q, o));
}

fn time_calls(trials: usize, mut call: impl FnMut()) -> (f64, f64, f64) {
    for _ in 0..WARMUP {
        call();
    }
    let mut us: Vec<f64> = (0..trials)
        .map(|_| {
            let start = Instant::now();
            call();
            start.elapsed().as_secs_f64() * 1e6
        })
        .collect();
    let mean = us.iter().sum::<f64>() / trials as f64;
    let var = us.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / trials as f64;
    us.sort_by(f64::total_cmp);
    let median = if trials % 2 == 1 {
        us[trials / 2]
    } else {
        (us[trials / 2 - 1] + us[trials / 2]) / 2.0
    };
    (mean, var.sqrt(), median)
}

/// Times one batched evaluation per trial for every footprint × count ×
/// available evaluator, single-threaded, plus a data-parallel configuration
/// when `parallel_threads > 1`. The query batch for each count depends only
/// on `seed` and the count.
pub fn scaling_benchmark(
    footprints: &[BenchFootprint],
    counts: &[usize],
    trials: usize,
    parallel_threads: usize,
    seed: u64,
) -> Result<BenchReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if counts.is_empty() || counts.contains(&0) || counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("query counts must be positive and strictly ascending".into()));
    }
    let pool = if parallel_threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(parallel_threads)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?,
        )
    } else {
        None
    };
    let mut rows = Vec::new();
    for fp in footprints {
        for kind in EvaluatorKind::ALL {
            let Some(spec) = fp.evaluator(kind) else { continue };
            for &count in counts {
                let queries = query_batch(seed ^ count as u64, count);
                let mut out = vec![0.0; count];
                let mut push = |threads: usize, (mean_us, std_us, median_us): (f64, f64, f64)| {
                    rows.push(BenchRow {
                        footprint: fp.name.clone(),
                        evaluator: kind,
                        queries: count,
                        trials,
                        mean_us,
                        std_us,
                        median_us,
                        threads,
                    })
                };
                push(1, time_calls(trials, || {
                    evaluate(spec, black_box(&queries), &mut out);
                    black_box(&out);
                }));
                if let Some(pool) = &pool {
                    let timing = pool.install(|| {
                        time_calls(trials, || {
                            evaluate_parallel(spec, black_box(&queries), &mut out);
                            black_box(&out);
                        })
                    });
                    push(parallel_threads, timing);
                }
            }
        }
    }
    Ok(BenchReport { rows })
}
