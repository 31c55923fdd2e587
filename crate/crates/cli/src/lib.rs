//! `mdist`: compute, compare and map motion distortion of ground-vehicle
//! datasets, and simulate datasets with known slip.

use std::ffi::OsStr;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use motion_distortion::ingest::{
    align, load_dataset_dir, AlignOptions, FiniteDifference, VelocitySource,
};
use motion_distortion::io::write_atomic;
use motion_distortion::mapping::{render_map, Catalog, RiskZoning, TerrainScale};
use motion_distortion::metrics::{median_ratio, CompareOptions, MedianRatio};
use motion_distortion::sim::Scenario;
use motion_distortion::{
    compare, distortion_series, summarize, AngularWeight, ComparisonResult, DistortionSeries, Error, SummaryStats,
};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_INSUFFICIENT: u8 = 2;

/// Suffix of the per-step series written by `compute`.
pub const SERIES_SUFFIX: &str = ".distortion.csv";
/// Suffix of the summary written by `compute`.
pub const SUMMARY_SUFFIX: &str = ".summary.json";

#[derive(Debug, Parser)]
#[command(name = "mdist", version, about = "Motion distortion metric for ground-vehicle datasets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-step slip series and summary statistics of a dataset directory.
    Compute(ComputeArgs),
    /// Rank-sum comparison of two series (or median ratio of two summaries).
    Compare(CompareArgs),
    /// Kinetic-energy vs terrain-complexity map of a deployment catalog.
    Map(MapArgs),
    /// Generate a dataset directory from a scenario file.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Directory holding dataset.toml, commands.csv and velocities.csv or poses.csv.
    pub dataset: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Resampling grid step [s].
    #[arg(long, default_value_t = 0.05)]
    pub grid_dt: f64,
    /// Largest distance to a source sample before a grid point is dropped [s].
    #[arg(long, default_value_t = 0.2)]
    pub max_gap: f64,
    /// Weight of the angular slip component in the modulus.
    #[arg(long, default_value_t = 1.0)]
    pub angular_weight: f64,
    /// Keep every n-th step of the series.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Differentiate poses.csv even when velocities.csv is present.
    #[arg(long)]
    pub from_poses: bool,
    /// Terrain scale CSV (`name,ordinal`) replacing the built-in one.
    #[arg(long)]
    pub terrain_scale: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Reference input: series CSV or summary JSON.
    pub a: PathBuf,
    /// Input compared against the reference.
    pub b: PathBuf,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Keep every n-th step of both series before testing.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Output JSON file.
    #[arg(long, default_value = "comparison.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Catalog CSV with columns label,vehicle,mass,v_max,terrain,model_type.
    pub catalog: PathBuf,
    /// Terrain scale CSV (`name,ordinal`) replacing the built-in one.
    #[arg(long)]
    pub terrain_scale: Option<PathBuf>,
    /// Output directory for map.csv and map.svg.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario TOML file.
    pub scenario: PathBuf,
    /// Output dataset directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InsufficientData(_) | Error::Alignment(_) => EXIT_INSUFFICIENT,
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs one command. Whatever belongs on stdout is returned.
pub fn run(cli: Cli) -> CliResult<Option<String>> {
    match cli.command {
        Command::Compute(a) => cmd_compute(&a).map(|_| None),
        Command::Compare(a) => cmd_compare(&a).map(Some),
        Command::Map(a) => cmd_map(&a).map(|_| None),
        Command::Simulate(a) => cmd_simulate(&a).map(|_| None),
    }
}

fn terrain_scale(path: Option<&Path>) -> CliResult<TerrainScale> {
    match path {
        None => Ok(TerrainScale::default()),
        Some(p) => {
            let f = fs::File::open(p).map_err(|e| Error::Io { path: p.into(), source: e })?;
            Ok(TerrainScale::read_csv(f).map_err(|e| e.with_path(p))?)
        }
    }
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Validation(e.to_string()))?;
    text.push('\n');
    Ok(write_atomic(path, text.as_bytes())?)
}

/// Parameters echoed into outputs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ComputeParams {
    pub grid_dt: f64,
    pub max_gap: f64,
    pub angular_weight: f64,
    pub stride: usize,
    pub velocity_source: String,
}

/// Contents of `<name>.summary.json`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SummaryReport {
    pub dataset: String,
    pub vehicle: String,
    pub terrain: String,
    pub terrain_ordinal: u32,
    pub max_kinetic_energy: f64,
    #[serde(flatten)]
    pub stats: SummaryStats<f64>,
    pub parameters: ComputeParams,
}

/// Paths written by `compute`.
#[derive(Debug, Clone)]
pub struct ComputeOutput {
    pub series: PathBuf,
    pub summary: PathBuf,
    pub report: SummaryReport,
}

pub fn cmd_compute(args: &ComputeArgs) -> CliResult<ComputeOutput> {
    let weight = AngularWeight::new(args.angular_weight)?;
    let opts = AlignOptions { grid_dt: args.grid_dt, max_gap: args.max_gap };
    opts.validate()?;
    if args.stride == 0 {
        return Err(Error::Parameter("stride must be >= 1".into()).into());
    }
    let scale = terrain_scale(args.terrain_scale.as_deref())?;
    let source = if args.from_poses {
        VelocitySource::Poses(FiniteDifference::default())
    } else {
        VelocitySource::Auto
    };
    let loaded = load_dataset_dir::<f64>(&args.dataset, &scale, source)?;
    let used = if !args.from_poses && args.dataset.join(motion_distortion::ingest::VELOCITIES_FILE).exists() {
        "velocities"
    } else {
        "poses"
    };
    let meta = loaded.meta.clone();
    let ds = align(loaded.meta, &loaded.commands, &loaded.velocities, opts)?;
    let series = distortion_series(&ds, weight)?.decimate(args.stride)?;
    let stats = summarize(&series)?;

    let name = meta.name.clone();
    let series_path = args.out.join(format!("{name}{SERIES_SUFFIX}"));
    let summary_path = args.out.join(format!("{name}{SUMMARY_SUFFIX}"));
    let mut buf = Vec::new();
    series.write_csv(&mut buf)?;
    write_atomic(&series_path, &buf)?;
    let report = SummaryReport {
        dataset: name,
        vehicle: meta.vehicle.name().to_string(),
        terrain: meta.terrain.name.clone(),
        terrain_ordinal: meta.terrain.ordinal,
        max_kinetic_energy: motion_distortion::kinetic_energy(&meta.vehicle),
        stats,
        parameters: ComputeParams {
            grid_dt: args.grid_dt,
            max_gap: args.max_gap,
            angular_weight: args.angular_weight,
            stride: args.stride,
            velocity_source: used.into(),
        },
    };
    write_json(&summary_path, &report)?;
    Ok(ComputeOutput { series: series_path, summary: summary_path, report })
}

/// One side of a comparison.
enum Input {
    Series(DistortionSeries<f64>),
    Summary { name: String, median: f64 },
}

impl Input {
    fn name(&self) -> &str {
        match self {
            Input::Series(s) => s.dataset_name(),
            Input::Summary { name, .. } => name,
        }
    }
}

fn dataset_name_of(path: &Path) -> String {
    let file = path.file_name().and_then(OsStr::to_str).unwrap_or("dataset");
    [SERIES_SUFFIX, SUMMARY_SUFFIX, ".csv", ".json"]
        .iter()
        .find_map(|s| file.strip_suffix(s))
        .unwrap_or(file)
        .to_string()
}

fn read_input(path: &Path) -> CliResult<Input> {
    let bytes = fs::read(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    if path.extension() == Some(OsStr::new("json")) {
        if bytes.iter().all(u8::is_ascii_whitespace) {
            return Err(Error::InsufficientData(format!("{} is empty", path.display())).into());
        }
        let r: SummaryReport = serde_json::from_slice(&bytes)
            .map_err(|e| Error::Parse { path: Some(path.into()), line: e.line() as u64, message: e.to_string() })?;
        if r.stats.n == 0 {
            return Err(Error::InsufficientData(format!("{} summarizes no samples", path.display())).into());
        }
        return Ok(Input::Summary { name: r.dataset, median: r.stats.median });
    }
    let series = DistortionSeries::read_csv(dataset_name_of(path), bytes.as_slice()).map_err(|e| e.with_path(path))?;
    if series.is_empty() {
        return Err(Error::InsufficientData(format!("{} has no samples", path.display())).into());
    }
    Ok(Input::Series(series))
}

/// Comparison written when either side is a summary: no samples, no test.
#[derive(Debug, Clone, Serialize)]
pub struct MedianComparison {
    pub a: String,
    pub b: String,
    pub median_a: f64,
    pub median_b: f64,
    pub median_ratio: MedianRatio<f64>,
    pub median_ratio_degenerate: bool,
    pub p_value: Option<f64>,
    pub significant: Option<bool>,
    pub alpha: f64,
}

fn ratio_text(r: MedianRatio<f64>) -> String {
    match r {
        MedianRatio::Finite(x) => format!("{x:.3}"),
        MedianRatio::Infinite => "inf".into(),
        MedianRatio::Undefined => "undefined".into(),
    }
}

/// One-line verdict for a tested comparison.
pub fn verdict(r: &ComparisonResult<f64>) -> String {
    let word = if !r.significant {
        "indistinguishable from"
    } else if r.median_b > r.median_a {
        "harder than"
    } else {
        "easier than"
    };
    format!(
        "{} is {} {} (median ratio {}, p = {:.3e}, alpha = {})",
        r.b,
        word,
        r.a,
        ratio_text(r.median_ratio),
        r.p_value,
        r.alpha
    )
}

pub fn cmd_compare(args: &CompareArgs) -> CliResult<String> {
    let opts = CompareOptions { alpha: args.alpha, stride: args.stride };
    opts.validate()?;
    let a = read_input(&args.a)?;
    let b = read_input(&args.b)?;
    match (&a, &b) {
        (Input::Series(sa), Input::Series(sb)) => {
            let r = compare(sa, sb, opts)?;
            write_json(&args.out, &r)?;
            Ok(verdict(&r))
        }
        _ => {
            let median = |i: &Input| match i {
                Input::Series(s) => motion_distortion::metrics::median(s.decimate(opts.stride)?.modulus()),
                Input::Summary { median, .. } => Ok(*median),
            };
            let (ma, mb) = (median(&a)?, median(&b)?);
            let ratio = median_ratio(ma, mb);
            let r = MedianComparison {
                a: a.name().into(),
                b: b.name().into(),
                median_a: ma,
                median_b: mb,
                median_ratio: ratio,
                median_ratio_degenerate: ratio.is_degenerate(),
                p_value: None,
                significant: None,
                alpha: args.alpha,
            };
            write_json(&args.out, &r)?;
            Ok(format!(
                "{} vs {}: median ratio {} (not tested, a summary carries no samples)",
                r.b,
                r.a,
                ratio_text(ratio)
            ))
        }
    }
}

pub const MAP_CSV: &str = "map.csv";
pub const MAP_SVG: &str = "map.svg";

pub fn cmd_map(args: &MapArgs) -> CliResult<Vec<motion_distortion::mapping::MapPoint>> {
    let scale = terrain_scale(args.terrain_scale.as_deref())?;
    let f = fs::File::open(&args.catalog).map_err(|e| Error::Io { path: args.catalog.clone(), source: e })?;
    let catalog = Catalog::<f64>::read_csv(f, &scale).map_err(|e| e.with_path(&args.catalog))?;
    let points = render_map(
        &catalog,
        &RiskZoning::default(),
        &scale,
        &args.out.join(MAP_CSV),
        &args.out.join(MAP_SVG),
    )?;
    Ok(points)
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let mut scenario = Scenario::<f64>::read(&args.scenario)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    scenario.run()?.write(&args.out)?;
    Ok(())
}
