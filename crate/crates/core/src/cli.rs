//! `dtsim` command line. Exit codes: 0 success, 1 usage or configuration
//! error, 2 runtime error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::analysis::{
    cloud_mask, matched_filter, score_map, stretch, thermal_anomalies, unmix, SpectralAngleScorer, Thresholds,
};
use crate::config::MissionConfig;
use crate::geometry::{flat_earth_lead_time, lead_time, OrbitConfig};
use crate::mission::{report, run_mission};
use crate::rng::SimRng;
use crate::scene::truth::{cloud_truth, spectral_truth, thermal_truth, write_truth, TruthRecord};
use crate::scene::{
    generate_cloud_field, generate_spectral_scene, generate_thermal_scene, read_raster, render_cloud_scene, write_grid,
    write_raster, EndmemberLibrary, GroundSpectrum, RasterGrid, SceneRaster, ThermalSceneParams,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "dtsim", version, about = "Dynamic targeting simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print lead time and ground geometry for a sweep of lookahead angles.
    Geometry(GeometryArgs),
    /// Generate a synthetic scene and write it as a DTRAST01 raster.
    Scene(SceneArgs),
    /// Run one analysis kernel on a raster.
    Analyze(AnalyzeArgs),
    /// Run a mission from a config file.
    Simulate(SimulateArgs),
    /// Recompute mission metrics from an event log.
    Report(ReportArgs),
}

#[derive(Debug, clap::Args)]
pub struct GeometryArgs {
    #[arg(long, default_value_t = 500.0)]
    pub altitude_km: f64,
    #[arg(long, default_value_t = 7.5)]
    pub speed_km_s: f64,
    #[arg(long, default_value_t = crate::geometry::DEFAULT_EARTH_RADIUS_KM)]
    pub earth_radius_km: f64,
    #[arg(long, default_value_t = 40.0)]
    pub from_deg: f64,
    #[arg(long, default_value_t = 50.0)]
    pub to_deg: f64,
    #[arg(long, default_value_t = 5.0)]
    pub step_deg: f64,
    /// One JSON object per angle instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SceneKind {
    Cloud,
    Thermal,
    Spectral,
}

#[derive(Debug, clap::Args)]
pub struct SceneArgs {
    #[arg(long, value_enum)]
    pub kind: SceneKind,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 128)]
    pub width: usize,
    #[arg(long, default_value_t = 128)]
    pub height: usize,
    #[arg(long, default_value_t = 0.5)]
    pub coverage: f64,
    #[arg(long, default_value_t = 16.0)]
    pub correlation_px: f64,
    #[arg(long, default_value_t = 3)]
    pub hotspots: usize,
    #[arg(long, default_value_t = 2.0)]
    pub sigma_px: f64,
    #[arg(long, default_value_t = 0.01)]
    pub noise_sigma: f64,
    /// Endmember library (JSON) for spectral scenes; built-in if omitted.
    #[arg(long)]
    pub library: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth sidecar (JSON Lines).
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kernel {
    Stretch,
    Cloud,
    Thermal,
    Sam,
    MatchedFilter,
    Unmix,
}

#[derive(Debug, clap::Args)]
pub struct AnalyzeArgs {
    #[arg(long, value_enum)]
    pub kernel: Kernel,
    #[arg(long)]
    pub input: PathBuf,
    /// Output raster: stretched image, 0/1 cloud mask, score map or
    /// abundance bands. Thermal detections always go to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated target spectrum for `sam` and `matched-filter`.
    #[arg(long, value_delimiter = ',')]
    pub target: Vec<f64>,
    #[arg(long)]
    pub library: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub p_low: f64,
    #[arg(long, default_value_t = 99.0)]
    pub p_high: f64,
    /// TOML file with a `[thresholds]`-style table of overrides.
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub cycles: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub log: PathBuf,
    /// Also write the metrics CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LibraryFile {
    #[serde(default)]
    names: Vec<String>,
    spectra: Vec<Vec<f64>>,
}

/// Four-band (R, G, B, NIR) vegetation, soil and water spectra.
pub fn builtin_library() -> EndmemberLibrary {
    EndmemberLibrary::new(
        vec!["vegetation".into(), "soil".into(), "water".into()],
        vec![
            vec![0.05, 0.09, 0.04, 0.50],
            vec![0.30, 0.25, 0.20, 0.35],
            vec![0.03, 0.05, 0.08, 0.02],
        ],
    )
    .expect("built-in library is valid")
}

fn load_library(path: Option<&PathBuf>) -> Result<EndmemberLibrary, CliError> {
    let Some(path) = path else {
        return Ok(builtin_library());
    };
    let text = std::fs::read_to_string(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    let file: LibraryFile = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let names = if file.names.is_empty() {
        (0..file.spectra.len()).map(|i| format!("em{i}")).collect()
    } else {
        file.names
    };
    EndmemberLibrary::new(names, file.spectra).map_err(usage)
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn write_truth_file(path: Option<&PathBuf>, records: &[TruthRecord]) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut out = create(path)?;
        write_truth(&mut out, records)
            .and_then(|_| out.flush())
            .map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_geometry(a: &GeometryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let orbit = OrbitConfig {
        altitude_km: a.altitude_km,
        ground_speed_km_s: a.speed_km_s,
        earth_radius_km: a.earth_radius_km,
    };
    orbit.validate().map_err(usage)?;
    if a.step_deg.is_nan() || a.step_deg <= 0.0 || a.to_deg < a.from_deg {
        return Err(usage("need --step-deg > 0 and --to-deg >= --from-deg"));
    }
    let n = ((a.to_deg - a.from_deg) / a.step_deg + 1e-9).floor() as usize;
    if !a.json {
        writeln!(
            out,
            "{:>10} {:>12} {:>14} {:>12} {:>14}",
            "angle_deg", "lead_s", "ground_km", "central_deg", "flat_lead_s"
        )
        .map_err(runtime)?;
    }
    for k in 0..=n {
        let angle = a.from_deg + k as f64 * a.step_deg;
        let g = lead_time(&orbit, angle).map_err(usage)?;
        let flat = flat_earth_lead_time(&orbit, angle).map_err(usage)?;
        let line = if a.json {
            serde_json::json!({
                "look_angle_deg": g.look_angle_deg,
                "lead_time_s": g.lead_time_s,
                "ground_distance_km": g.ground_distance_km,
                "central_angle_rad": g.central_angle_rad,
                "flat_earth_lead_time_s": flat,
            })
            .to_string()
        } else {
            format!(
                "{:>10.2} {:>12.3} {:>14.3} {:>12.4} {:>14.3}",
                g.look_angle_deg,
                g.lead_time_s,
                g.ground_distance_km,
                g.central_angle_rad.to_degrees(),
                flat
            )
        };
        writeln!(out, "{line}").map_err(runtime)?;
    }
    Ok(())
}

/// Abundances drawn uniformly on the simplex (normalized exponentials).
fn random_abundances(seed: u64, n: usize, k: usize) -> Vec<Vec<f64>> {
    let mut rng = SimRng::new(seed ^ 0xABu64);
    (0..n)
        .map(|_| {
            let e: Vec<f64> = (0..k).map(|_| -libm::log(1.0 - rng.next_f64())).collect();
            let s: f64 = e.iter().sum();
            e.iter().map(|v| v / s).collect()
        })
        .collect()
}

fn cmd_scene(a: &SceneArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (raster, truth) = match a.kind {
        SceneKind::Cloud => {
            let field = generate_cloud_field(a.seed, a.width, a.height, a.coverage, a.correlation_px).map_err(usage)?;
            (
                render_cloud_scene(&field, GroundSpectrum::default()),
                cloud_truth(&field),
            )
        }
        SceneKind::Thermal => {
            let params = ThermalSceneParams {
                width: a.width,
                height: a.height,
                n_hotspots: a.hotspots,
                hotspot_sigma_px: a.sigma_px,
                ..ThermalSceneParams::default()
            };
            let scene = generate_thermal_scene(a.seed, &params).map_err(usage)?;
            let truth = thermal_truth(&scene);
            (scene.raster, truth)
        }
        SceneKind::Spectral => {
            let lib = load_library(a.library.as_ref())?;
            let abundances = random_abundances(a.seed, a.width * a.height, lib.len());
            let scene =
                generate_spectral_scene(a.seed, a.width, a.height, &lib, &abundances, a.noise_sigma).map_err(usage)?;
            let truth = spectral_truth(&scene);
            (scene.raster, truth)
        }
    };
    write_raster(&raster, &a.out).map_err(runtime)?;
    write_truth_file(a.truth.as_ref(), &truth)?;
    writeln!(
        out,
        "wrote {} ({}x{}x{}) sha256 {}",
        a.out.display(),
        raster.width(),
        raster.height(),
        raster.bands(),
        raster.content_hash()
    )
    .map_err(runtime)
}

fn load_thresholds(path: Option<&PathBuf>) -> Result<Thresholds, CliError> {
    match path {
        None => Ok(Thresholds::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| runtime(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
    }
}

fn require_out(a: &AnalyzeArgs) -> Result<&PathBuf, CliError> {
    a.out.as_ref().ok_or_else(|| usage("--out is required for this kernel"))
}

fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let image: SceneRaster = read_raster(&a.input).map_err(runtime)?;
    let t = load_thresholds(a.thresholds.as_ref())?;
    match a.kernel {
        Kernel::Stretch => {
            let s = stretch(&image, a.p_low, a.p_high).map_err(usage)?;
            write_raster(&s, require_out(a)?).map_err(runtime)?;
            writeln!(out, "stretched {} bands", s.bands()).map_err(runtime)?;
        }
        Kernel::Cloud => {
            let mask = cloud_mask(&image, t.t_bright, t.t_sat).map_err(usage)?;
            if let Some(path) = &a.out {
                let values = mask.cloudy.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
                let grid = RasterGrid::new(mask.width, mask.height, 1, values).map_err(runtime)?;
                write_grid(&grid, path).map_err(runtime)?;
            }
            writeln!(out, "cloud_fraction {}", mask.cloud_fraction).map_err(runtime)?;
        }
        Kernel::Thermal => {
            let detections = thermal_anomalies(&image, t.t_hot, t.t_ratio).map_err(usage)?;
            for d in &detections {
                writeln!(out, "{}", serde_json::to_string(d).map_err(runtime)?).map_err(runtime)?;
            }
        }
        Kernel::Sam | Kernel::MatchedFilter => {
            if a.target.is_empty() {
                return Err(usage("--target is required for this kernel"));
            }
            let map = if matches!(a.kernel, Kernel::Sam) {
                if a.target.len() != image.bands() {
                    return Err(usage(format!(
                        "target has {} bands, image has {}",
                        a.target.len(),
                        image.bands()
                    )));
                }
                let scorer = SpectralAngleScorer::new(a.target.clone()).map_err(usage)?;
                score_map(&image, &scorer)
            } else {
                matched_filter(&image, &a.target, None).map_err(usage)?
            };
            let path = require_out(a)?;
            write_grid(&map.to_grid().map_err(runtime)?, path).map_err(runtime)?;
            if matches!(a.kernel, Kernel::Sam) {
                let hits = map.scores.iter().filter(|&&s| s <= t.sam_threshold_rad).count();
                writeln!(out, "pixels within {} rad: {hits}", t.sam_threshold_rad).map_err(runtime)?;
            } else {
                let max = map.scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                writeln!(out, "max score {max}").map_err(runtime)?;
            }
        }
        Kernel::Unmix => {
            let lib = load_library(a.library.as_ref())?;
            if lib.bands() != image.bands() {
                return Err(usage(format!(
                    "library has {} bands, image has {}",
                    lib.bands(),
                    image.bands()
                )));
            }
            let n = image.pixels();
            let mut values = vec![0f32; lib.len() * n];
            let mut residual = 0.0f64;
            for r in 0..image.height() {
                for c in 0..image.width() {
                    let u = unmix(&image.pixel(r, c), &lib).map_err(runtime)?;
                    let i = r * image.width() + c;
                    for (k, &ab) in u.abundances.iter().enumerate() {
                        values[k * n + i] = ab as f32;
                    }
                    residual = residual.max(u.residual);
                }
            }
            if let Some(path) = &a.out {
                let grid = RasterGrid::new(image.width(), image.height(), lib.len(), values).map_err(runtime)?;
                write_grid(&grid, path).map_err(runtime)?;
            }
            writeln!(
                out,
                "unmixed {n} pixels over {} endmembers, max residual {residual}",
                lib.len()
            )
            .map_err(runtime)?;
        }
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = MissionConfig::load(&a.config).map_err(|e| match e {
        crate::config::ConfigError::Io { .. } => runtime(e),
        other => usage(other),
    })?;
    if let Some(p) = &a.log {
        cfg.output.log = p.clone();
    }
    if let Some(p) = &a.metrics {
        cfg.output.metrics = p.clone();
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.cycles {
        cfg.n_cycles = n;
    }
    let metrics = run_mission(&cfg).map_err(runtime)?;
    write!(out, "{}", metrics.summary()).map_err(runtime)
}

fn cmd_report(a: &ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let metrics = report(&a.log).map_err(runtime)?;
    write!(out, "{}", metrics.summary()).map_err(runtime)?;
    write!(out, "{}", metrics.to_csv()).map_err(runtime)?;
    if let Some(path) = &a.csv {
        std::fs::write(path, metrics.to_csv()).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Geometry(a) => cmd_geometry(a, out),
        Command::Scene(a) => cmd_scene(a, out),
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Report(a) => cmd_report(a, out),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
