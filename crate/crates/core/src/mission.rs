//! Mission driver: many cycles, each flown twice over the same scene (DT and
//! nadir-only baseline), aggregated into [`MissionMetrics`].

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::MissionConfig;
use crate::executor::{run_baseline, run_cycle, CycleMode, CycleRecord, CycleStatus, GroundTruthScene};
use crate::rng::mix_seed;
use crate::scene::{
    generate_cloud_field, generate_thermal_scene, render_cloud_scene, GroundSpectrum, SceneError, ThermalSceneParams,
};

#[derive(Debug, Error)]
pub enum MissionError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {reason}")]
    Malformed { path: String, line: usize, reason: String },
    #[error("worker pool: {0}")]
    Pool(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> MissionError + '_ {
    move |source| MissionError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub const METRICS_CSV_HEADER: &str = "cycles_total,cycles_feasible,dt_cloud_free_fraction,baseline_cloud_free_fraction,dt_hotspot_recall,baseline_hotspot_recall,mean_timeline_slack_s";

/// Cycle counts cover DT cycles only. Recall is 0 when no hotspots were
/// generated; mean slack averages DT cycles that completed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissionMetrics {
    pub cycles_total: usize,
    pub cycles_feasible: usize,
    pub dt_cloud_free_fraction: f64,
    pub baseline_cloud_free_fraction: f64,
    pub dt_hotspot_recall: f64,
    pub baseline_hotspot_recall: f64,
    pub mean_timeline_slack_s: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

impl MissionMetrics {
    pub fn from_records(records: &[CycleRecord]) -> Self {
        let of = |mode| records.iter().filter(move |r: &&CycleRecord| r.mode == mode);
        let dt: Vec<&CycleRecord> = of(CycleMode::Dt).collect();
        let base: Vec<&CycleRecord> = of(CycleMode::Baseline).collect();
        let cloud_free =
            |rs: &[&CycleRecord]| ratio(rs.iter().filter(|r| r.cloud_free).count() as f64, rs.len() as f64);
        let recall = |rs: &[&CycleRecord]| {
            let captured: usize = rs.iter().map(|r| r.hotspots_captured).sum();
            let total: usize = rs.iter().map(|r| r.hotspots_total).sum();
            ratio(captured as f64, total as f64)
        };
        let ok: Vec<f64> = dt
            .iter()
            .filter(|r| r.status == CycleStatus::Ok)
            .map(|r| r.slack_s)
            .collect();
        Self {
            cycles_total: dt.len(),
            cycles_feasible: dt.iter().filter(|r| r.feasible).count(),
            dt_cloud_free_fraction: cloud_free(&dt),
            baseline_cloud_free_fraction: cloud_free(&base),
            dt_hotspot_recall: recall(&dt),
            baseline_hotspot_recall: recall(&base),
            mean_timeline_slack_s: ratio(ok.iter().sum(), ok.len() as f64),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.cycles_total,
            self.cycles_feasible,
            self.dt_cloud_free_fraction,
            self.baseline_cloud_free_fraction,
            self.dt_hotspot_recall,
            self.baseline_hotspot_recall,
            self.mean_timeline_slack_s
        )
    }

    pub fn to_csv(&self) -> String {
        format!("{METRICS_CSV_HEADER}\n{}\n", self.csv_row())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "cycles:                 {} ({} feasible)",
            self.cycles_total, self.cycles_feasible
        );
        let _ = writeln!(
            s,
            "cloud-free captures:    dt {:.4}  baseline {:.4}",
            self.dt_cloud_free_fraction, self.baseline_cloud_free_fraction
        );
        let _ = writeln!(
            s,
            "hotspot recall:         dt {:.4}  baseline {:.4}",
            self.dt_hotspot_recall, self.baseline_hotspot_recall
        );
        let _ = writeln!(s, "mean timeline slack:    {:.3} s", self.mean_timeline_slack_s);
        s
    }
}

/// Ground-truth scene for one cycle, geolocated so the target point sits at
/// along/across-track 0.
pub fn build_scene(cfg: &MissionConfig, seed: u64) -> Result<GroundTruthScene, SceneError> {
    let sc = &cfg.scene;
    let width = cfg.tiles.count * sc.tile_px;
    let height = sc.tile_px;
    let origin = (-0.5 * height as f64 * sc.gsd_km, -0.5 * width as f64 * sc.gsd_km);
    if cfg.policy.name.uses_clouds() {
        let field = generate_cloud_field(seed, width, height, sc.coverage, sc.correlation_px)?;
        let raster = render_cloud_scene(&field, GroundSpectrum::default()).with_geo(sc.gsd_km, origin)?;
        Ok(GroundTruthScene::new(raster, Some(field), Vec::new()))
    } else {
        let params = ThermalSceneParams {
            width,
            height,
            n_hotspots: sc.n_hotspots,
            hotspot_sigma_px: sc.hotspot_sigma_px,
            background_level: sc.background_level,
            min_separation_px: sc.min_separation_px,
        };
        let scene = generate_thermal_scene(seed, &params)?;
        let raster = scene.raster.with_geo(sc.gsd_km, origin)?;
        Ok(GroundTruthScene::new(raster, None, scene.hotspots))
    }
}

/// DT and baseline records for cycle `i`, in that order.
pub fn run_cycle_pair(cfg: &MissionConfig, i: u64) -> [CycleRecord; 2] {
    let seed = mix_seed(cfg.seed, i);
    let cc = cfg.cycle_config();
    match build_scene(cfg, seed) {
        Ok(scene) => [run_cycle(&scene, &cc, i, seed), run_baseline(&scene, &cc, i, seed)],
        Err(e) => [
            CycleRecord::failed(i, CycleMode::Dt, seed, cc.policy, &e),
            CycleRecord::failed(i, CycleMode::Baseline, seed, cc.policy, &e),
        ],
    }
}

/// Runs every cycle and returns the records in cycle order. The worker
/// count changes speed only.
pub fn simulate(cfg: &MissionConfig) -> Result<Vec<CycleRecord>, MissionError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| MissionError::Pool(e.to_string()))?;
    let pairs: Vec<[CycleRecord; 2]> = pool.install(|| {
        (0..cfg.n_cycles as u64)
            .into_par_iter()
            .map(|i| run_cycle_pair(cfg, i))
            .collect()
    });
    Ok(pairs.into_iter().flatten().collect())
}

pub fn encode_log(records: &[CycleRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records always serialize"));
        out.push('\n');
    }
    out
}

/// Parses a JSON Lines event log. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn parse_log(reader: impl BufRead, path: &str) -> Result<Vec<CycleRecord>, MissionError> {
    let mut records = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| MissionError::Io {
            path: path.to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| MissionError::Malformed {
            path: path.to_string(),
            line: k + 1,
            reason: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

pub fn read_log(path: &Path) -> Result<Vec<CycleRecord>, MissionError> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    parse_log(BufReader::new(file), &path.display().to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), MissionError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    f.write_all(contents.as_bytes()).map_err(io_err(path))
}

/// Simulates, writes the event log and metrics CSV to the configured paths,
/// and returns the metrics.
pub fn run_mission(cfg: &MissionConfig) -> Result<MissionMetrics, MissionError> {
    let records = simulate(cfg)?;
    let metrics = MissionMetrics::from_records(&records);
    write_file(&cfg.output.log, &encode_log(&records))?;
    write_file(&cfg.output.metrics, &metrics.to_csv())?;
    Ok(metrics)
}

/// Recomputes metrics from an event log.
pub fn report(log: &Path) -> Result<MissionMetrics, MissionError> {
    Ok(MissionMetrics::from_records(&read_log(log)?))
}
