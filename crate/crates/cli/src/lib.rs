//! Command-line front end: episodes, suites, scenario generation, benchmarks
//! and signed-distance plots.

pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exact_mppi::geometry::{sdf_grid, Bounds, FootprintSpec, Point2};
use exact_mppi::world::{run_episode, EpisodeResult, GeneratorTemplate, PlannerFootprint, RunOptions, Scenario};
use exact_mppi_bench::{load_footprints, scaling_benchmark, BenchReport};
use serde::Serialize;

/// Stable process exit contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Config = 1,
    NavigationFailure = 2,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

/// Usage, IO and validation failures; always exit code 1.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<exact_mppi::Error> for ConfigError {
    fn from(e: exact_mppi::Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn io_context(path: &Path) -> impl FnOnce(std::io::Error) -> ConfigError + '_ {
    move |e| ConfigError(format!("{}: {e}", path.display()))
}

type CliResult<T> = Result<T, ConfigError>;

#[derive(Debug, Parser)]
#[command(name = "exact-mppi", version, about = "Exact-footprint MPPI navigation in a 2D simulator")]
pub struct Cli {
    /// Seed override (base seed for suites).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for rollouts and parallel benchmarks.
    #[arg(long, global = true, env = "EXACT_MPPI_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one episode; writes trajectory.csv, result.json and optionally trajectory.svg.
    Run(RunArgs),
    /// Run seeded trials and write an aggregate report to suite.json.
    Suite(SuiteArgs),
    /// Generate a scenario whose declared gap has the requested narrowness.
    Gen(GenArgs),
    /// Time the distance evaluators over growing query counts; writes bench.csv.
    Bench(BenchArgs),
    /// Plot a footprint's signed-distance field with its zero contour; writes sdf.svg.
    Sdf(SdfArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlannerArg {
    Exact,
    Hull,
}

impl From<PlannerArg> for PlannerFootprint {
    fn from(p: PlannerArg) -> Self {
        match p {
            PlannerArg::Exact => PlannerFootprint::Exact,
            PlannerArg::Hull => PlannerFootprint::ConvexHull,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TemplateArg {
    Corridor,
    Gap,
    Trap,
}

impl From<TemplateArg> for GeneratorTemplate {
    fn from(t: TemplateArg) -> Self {
        match t {
            TemplateArg::Corridor => GeneratorTemplate::Corridor,
            TemplateArg::Gap => GeneratorTemplate::Gap,
            TemplateArg::Trap => GeneratorTemplate::Trap,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    pub planner: PlannerArg,
    #[arg(long)]
    pub svg: bool,
}

/// Either a scenario file or a generator spec.
#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(required_unless_present = "template", conflicts_with = "template")]
    pub scenario: Option<PathBuf>,
    #[arg(long, value_enum, requires_all = ["don", "footprint"])]
    pub template: Option<TemplateArg>,
    #[arg(long)]
    pub don: Option<f64>,
    #[arg(long)]
    pub footprint: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Base seed; trial i uses base + i. Defaults to --seed, then the scenario seed.
    #[arg(long)]
    pub seeds: Option<u64>,
    #[arg(long, value_enum, default_value = "exact")]
    pub planner: PlannerArg,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub don: f64,
    #[arg(long)]
    pub footprint: PathBuf,
    #[arg(long, value_enum)]
    pub template: TemplateArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub footprints: PathBuf,
    #[arg(long, num_args = 1.., default_values_t = [100usize, 1_000, 10_000, 100_000, 1_000_000])]
    pub counts: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct SdfArgs {
    #[arg(long)]
    pub footprint: PathBuf,
    /// min_x min_y max_x max_y; defaults to the bounding disc plus 0.5 m.
    #[arg(long, num_args = 4, allow_negative_numbers = true)]
    pub bounds: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.02)]
    pub res: f64,
}

/// Means over successful trials; absent when nothing succeeded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub scenario: String,
    pub planner: PlannerFootprint,
    pub trials: usize,
    pub base_seed: u64,
    pub successes: usize,
    pub success_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_nav_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_path_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_speed: Option<f64>,
    pub results: Vec<EpisodeResult>,
}

impl SuiteReport {
    pub fn from_results(scenario: &str, planner: PlannerFootprint, base_seed: u64, results: Vec<EpisodeResult>) -> Self {
        let ok: Vec<&EpisodeResult> = results.iter().filter(|r| r.success).collect();
        let mean = |f: fn(&EpisodeResult) -> f64| (!ok.is_empty()).then(|| ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64);
        Self {
            scenario: scenario.to_string(),
            planner,
            trials: results.len(),
            base_seed,
            successes: ok.len(),
            success_rate: if results.is_empty() { 0.0 } else { ok.len() as f64 / results.len() as f64 },
            mean_nav_time: mean(|r| r.nav_time),
            mean_path_length: mean(|r| r.path_length),
            mean_speed: mean(|r| r.mean_speed),
            results,
        }
    }
}

/// Parses `args`, runs the command and reports errors on stderr.
pub fn main_with_args<I, T>(args: I) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Exit::Config } else { Exit::Success };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            Exit::Config
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<Exit> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError("--threads must be at least 1".into()));
        }
        // Ignored when a pool already exists (repeated in-process calls).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Run(args) => cmd_run(cli, args),
        Command::Suite(args) => cmd_suite(cli, args).map(|_| Exit::Success),
        Command::Gen(args) => cmd_gen(cli, args).map(|_| Exit::Success),
        Command::Bench(args) => cmd_bench(cli, args).map(|_| Exit::Success),
        Command::Sdf(args) => cmd_sdf(cli, args).map(|_| Exit::Success),
    }
}

fn out_dir(cli: &Cli) -> CliResult<PathBuf> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(io_context(&dir))?;
    Ok(dir)
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, contents).map_err(io_context(path))
}

fn load_scenario(path: &Path) -> CliResult<Scenario> {
    let text = fs::read_to_string(path).map_err(io_context(path))?;
    Scenario::from_json_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

fn load_footprint(path: &Path) -> CliResult<FootprintSpec> {
    FootprintSpec::load(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Runs one episode and writes its artifacts into `--out`.
pub fn cmd_run(cli: &Cli, args: &RunArgs) -> CliResult<Exit> {
    let scenario = load_scenario(&args.scenario)?;
    let options = RunOptions {
        seed: cli.seed,
        planner: args.planner.into(),
    };
    let result = run_episode(&scenario, &options)?;
    let dir = out_dir(cli)?;
    let mut csv = Vec::new();
    result.write_trajectory_csv(&mut csv)?;
    write(&dir.join("trajectory.csv"), csv)?;
    write(&dir.join("result.json"), to_json(&result))?;
    if args.svg {
        write(&dir.join("trajectory.svg"), svg::episode_svg(&scenario, &result))?;
    }
    println!(
        "{}: success={} failure_kind={} nav_time={:.2}s path_length={:.2}m",
        scenario.name,
        result.success,
        serde_json::to_value(result.failure_kind).expect("enum").as_str().unwrap_or_default(),
        result.nav_time,
        result.path_length
    );
    Ok(if result.success { Exit::Success } else { Exit::NavigationFailure })
}

/// Runs `--trials` episodes with seeds base, base + 1, … in trial order.
pub fn cmd_suite(cli: &Cli, args: &SuiteArgs) -> CliResult<SuiteReport> {
    if args.trials == 0 {
        return Err(ConfigError("--trials must be at least 1".into()));
    }
    let scenario = match (&args.scenario, args.template) {
        (Some(path), _) => load_scenario(path)?,
        (None, Some(template)) => {
            let fp = load_footprint(args.footprint.as_ref().expect("required by clap"))?;
            GeneratorTemplate::from(template).generate(&fp, args.don.expect("required by clap"))?
        }
        (None, None) => unreachable!("clap requires a scenario or a template"),
    };
    let base = args.seeds.or(cli.seed).unwrap_or(scenario.seed);
    let planner: PlannerFootprint = args.planner.into();
    let results = (0..args.trials as u64)
        .map(|i| {
            run_episode(
                &scenario,
                &RunOptions {
                    seed: Some(base.wrapping_add(i)),
                    planner,
                },
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = SuiteReport::from_results(&scenario.name, planner, base, results);
    write(&out_dir(cli)?.join("suite.json"), to_json(&report))?;
    println!(
        "{}: {}/{} succeeded ({:?} planner)",
        report.scenario, report.successes, report.trials, report.planner
    );
    Ok(report)
}

/// Generates a scenario; printed to stdout, or written to `--out/<name>.json`.
pub fn cmd_gen(cli: &Cli, args: &GenArgs) -> CliResult<Scenario> {
    let fp = load_footprint(&args.footprint)?;
    let scenario = GeneratorTemplate::from(args.template).generate(&fp, args.don)?;
    let text = scenario.to_json_pretty() + "\n";
    match &cli.out {
        Some(_) => write(&out_dir(cli)?.join(format!("{}.json", scenario.name)), text)?,
        None => print!("{text}"),
    }
    Ok(scenario)
}

pub fn cmd_bench(cli: &Cli, args: &BenchArgs) -> CliResult<BenchReport> {
    let footprints = load_footprints(&args.footprints).map_err(|e| ConfigError(e.to_string()))?;
    if footprints.is_empty() {
        return Err(ConfigError(format!("{}: no footprint files", args.footprints.display())));
    }
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let report = scaling_benchmark(&footprints, &args.counts, args.trials, threads, cli.seed.unwrap_or(0))?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    write(&out_dir(cli)?.join("bench.csv"), &csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(report)
}

pub fn cmd_sdf(cli: &Cli, args: &SdfArgs) -> CliResult<()> {
    let fp = load_footprint(&args.footprint)?;
    let bounds = match &args.bounds {
        Some(b) => Bounds::new(Point2::new(b[0], b[1]), Point2::new(b[2], b[3])),
        None => {
            let r = fp.bounding_radius() + 0.5;
            Bounds::new(Point2::new(-r, -r), Point2::new(r, r))
        }
    };
    let grid = sdf_grid(&fp, bounds, args.res)?;
    write(&out_dir(cli)?.join("sdf.svg"), svg::sdf_svg(&grid, &fp))
}
