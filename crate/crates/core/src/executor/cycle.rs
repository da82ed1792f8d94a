use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{plan_cycle, CycleSchedule, Phase, PhaseBudget, PhaseKind, SpacecraftAgility};
use crate::analysis::{cloud_mask, stretch, thermal_anomalies, AnalysisProduct, ThermalDetection, Thresholds};
use crate::geometry::{footprint_at, lead_time, GroundFootprint, LookaheadGeometry, OrbitConfig};
use crate::scene::{CloudField, Hotspot, SceneRaster};
use crate::sensor::{capture, footprint_window, readout_time, CaptureRequest, ReadoutModel};
use crate::targeting::{select_target, tile_scores, PointingCommand, Policy, TileScore};

/// Everything one cycle needs besides the scene.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleConfig {
    pub orbit: OrbitConfig,
    pub lookahead_angle_deg: f64,
    pub policy: Policy,
    pub thresholds: Thresholds,
    pub n_tiles: usize,
    pub max_across_track_deg: f64,
    pub agility: SpacecraftAgility,
    /// `transfer_s` is replaced by the readout model's figure.
    pub budgets: PhaseBudget,
    pub readout: ReadoutModel,
    pub decimation: usize,
    pub band_subset: Vec<usize>,
    /// Percentile pair for the dynamic-range stretch, `None` to skip it.
    pub stretch: Option<(f64, f64)>,
    pub overlap: bool,
    pub margin_s: f64,
    pub smear: bool,
    pub nadir_fov_deg: f64,
    pub cloud_free_threshold: f64,
    /// Log measured kernel wall time (never used in feasibility math).
    pub record_wall_time: bool,
}

/// Scene plus the truth needed to score a capture. The raster's geolocation
/// places the target point (nadir at the end of the lead time) at along- and
/// across-track 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthScene {
    pub raster: SceneRaster,
    pub cloud: Option<CloudField>,
    pub hotspots: Vec<Hotspot>,
    pub hash: String,
}

impl GroundTruthScene {
    pub fn new(raster: SceneRaster, cloud: Option<CloudField>, hotspots: Vec<Hotspot>) -> Self {
        let hash = raster.content_hash();
        Self {
            raster,
            cloud,
            hotspots,
            hash,
        }
    }

    /// Footprint covering the whole raster.
    pub fn full_footprint(&self) -> GroundFootprint {
        let (oa, ox) = self.raster.origin_km();
        let (ea, ex) = self.raster.extent_km();
        GroundFootprint {
            along_track_center_km: oa + 0.5 * ea,
            across_track_center_km: ox + 0.5 * ex,
            along_track_extent_km: ea,
            across_track_extent_km: ex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleMode {
    Dt,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleStatus {
    Ok,
    Failed,
}

/// One event-log line. Field order is the serialized order and is part of
/// the log format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle_id: u64,
    pub mode: CycleMode,
    pub status: CycleStatus,
    pub seed: u64,
    pub policy: Policy,
    pub scene_hash: String,
    pub geometry: Option<LookaheadGeometry>,
    pub transfer_s: f64,
    pub phases: Vec<Phase>,
    pub critical_path_s: f64,
    pub deadline_s: f64,
    pub slack_s: f64,
    pub overlap_used: bool,
    pub feasible: bool,
    pub tile_scores: Vec<TileScore>,
    pub chosen_tile: Option<usize>,
    pub across_track_deg: f64,
    pub fallback: bool,
    pub captured_cloud_fraction: f64,
    pub analyzed_cloud_fraction: Option<f64>,
    pub cloud_free: bool,
    pub hotspots_total: usize,
    pub hotspots_captured: usize,
    pub detections: Vec<ThermalDetection>,
    /// Pixel smearing was requested; it is not modeled and was ignored.
    pub smear_ignored: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis_wall_time_s: Option<f64>,
    pub error: Option<String>,
}

impl CycleRecord {
    /// Record for a cycle that could not start, e.g. scene generation failed.
    pub fn failed(cycle_id: u64, mode: CycleMode, seed: u64, policy: Policy, error: impl std::fmt::Display) -> Self {
        Self {
            cycle_id,
            mode,
            status: CycleStatus::Failed,
            seed,
            policy,
            scene_hash: String::new(),
            geometry: None,
            transfer_s: 0.0,
            phases: Vec::new(),
            critical_path_s: 0.0,
            deadline_s: 0.0,
            slack_s: 0.0,
            overlap_used: false,
            feasible: false,
            tile_scores: Vec::new(),
            chosen_tile: None,
            across_track_deg: 0.0,
            fallback: false,
            captured_cloud_fraction: 0.0,
            analyzed_cloud_fraction: None,
            cloud_free: false,
            hotspots_total: 0,
            hotspots_captured: 0,
            detections: Vec::new(),
            smear_ignored: false,
            analysis_wall_time_s: None,
            error: Some(error.to_string()),
        }
    }

    fn empty(cycle_id: u64, mode: CycleMode, seed: u64, cfg: &CycleConfig, scene: &GroundTruthScene) -> Self {
        Self {
            status: CycleStatus::Ok,
            scene_hash: scene.hash.clone(),
            hotspots_total: scene.hotspots.len(),
            smear_ignored: cfg.smear && mode == CycleMode::Dt,
            error: None,
            ..Self::failed(cycle_id, mode, seed, cfg.policy, "")
        }
    }

    fn fail(mut self, err: impl std::fmt::Display) -> Self {
        self.status = CycleStatus::Failed;
        self.feasible = false;
        self.cloud_free = false;
        self.hotspots_captured = 0;
        self.error = Some(err.to_string());
        self
    }
}

struct NadirOutcome {
    captured_cloud_fraction: f64,
    analyzed_cloud_fraction: Option<f64>,
    hotspots_captured: usize,
    detections: Vec<ThermalDetection>,
}

fn preprocess(image: &SceneRaster, cfg: &CycleConfig) -> Result<SceneRaster, String> {
    match cfg.stretch {
        Some((lo, hi)) => stretch(image, lo, hi).map_err(|e| e.to_string()),
        None => Ok(image.clone()),
    }
}

fn capture_nadir(scene: &GroundTruthScene, cfg: &CycleConfig, across_deg: f64) -> Result<NadirOutcome, String> {
    let fp = footprint_at(&cfg.orbit, 0.0, across_deg, cfg.nadir_fov_deg).map_err(|e| e.to_string())?;
    let window = footprint_window(&scene.raster, &fp).map_err(|e| e.to_string())?;
    let bands: Vec<usize> = (0..scene.raster.bands()).collect();
    let image = capture(&scene.raster, &CaptureRequest::new(fp, 1, bands)).map_err(|e| e.to_string())?;

    let captured_cloud_fraction = match &scene.cloud {
        Some(field) => {
            let cloudy = (window.row0..window.row1)
                .flat_map(|r| (window.col0..window.col1).map(move |c| (r, c)))
                .filter(|&(r, c)| field.is_cloudy(r, c))
                .count();
            cloudy as f64 / (window.rows() * window.cols()) as f64
        }
        None => 0.0,
    };
    let hotspots_captured = scene.hotspots.iter().filter(|h| window.contains(h.row, h.col)).count();

    let (analyzed_cloud_fraction, detections) = if image.bands() == 4 {
        let pre = preprocess(&image, cfg)?;
        let t = &cfg.thresholds;
        let mask = cloud_mask(&pre, t.t_bright, t.t_sat).map_err(|e| e.to_string())?;
        let det = thermal_anomalies(&pre, t.t_hot, t.t_ratio).map_err(|e| e.to_string())?;
        (Some(mask.cloud_fraction), det)
    } else {
        (None, Vec::new())
    };
    Ok(NadirOutcome {
        captured_cloud_fraction,
        analyzed_cloud_fraction,
        hotspots_captured,
        detections,
    })
}

fn apply_nadir(record: &mut CycleRecord, outcome: NadirOutcome, cfg: &CycleConfig) {
    record.captured_cloud_fraction = outcome.captured_cloud_fraction;
    record.analyzed_cloud_fraction = outcome.analyzed_cloud_fraction;
    record.cloud_free = outcome.captured_cloud_fraction < cfg.cloud_free_threshold;
    record.hotspots_captured = outcome.hotspots_captured;
    record.detections = outcome.detections;
}

/// One dynamic-targeting cycle: lookahead capture, readout, analysis, tile
/// selection, schedule, and the nadir capture at the commanded tile (nadir
/// if the plan is infeasible). Errors become a failed record.
pub fn run_cycle(scene: &GroundTruthScene, cfg: &CycleConfig, cycle_id: u64, seed: u64) -> CycleRecord {
    let record = CycleRecord::empty(cycle_id, CycleMode::Dt, seed, cfg, scene);
    match dt_cycle(scene, cfg, record.clone()) {
        Ok(r) => r,
        Err(e) => record.fail(e),
    }
}

fn dt_cycle(scene: &GroundTruthScene, cfg: &CycleConfig, mut record: CycleRecord) -> Result<CycleRecord, String> {
    let geom = lead_time(&cfg.orbit, cfg.lookahead_angle_deg).map_err(|e| e.to_string())?;
    record.geometry = Some(geom);

    let footprint = scene.full_footprint();
    let request = CaptureRequest {
        footprint,
        decimation: cfg.decimation,
        band_subset: cfg.band_subset.clone(),
        smear: cfg.smear,
    };
    let lookahead = capture(&scene.raster, &request).map_err(|e| e.to_string())?;
    let transfer_s = readout_time(lookahead.pixels() as u64, lookahead.bands() as u64, &cfg.readout);
    record.transfer_s = transfer_s;
    let budgets = PhaseBudget {
        transfer_s,
        ..cfg.budgets
    };

    let started = Instant::now();
    let pre = preprocess(&lookahead, cfg)?;
    let t = &cfg.thresholds;
    let product = match cfg.policy {
        Policy::CloudAvoid | Policy::CloudSeek => {
            AnalysisProduct::Cloud(cloud_mask(&pre, t.t_bright, t.t_sat).map_err(|e| e.to_string())?)
        }
        Policy::ThermalHunt => AnalysisProduct::Thermal {
            width: pre.width(),
            height: pre.height(),
            detections: thermal_anomalies(&pre, t.t_hot, t.t_ratio).map_err(|e| e.to_string())?,
        },
    };
    if cfg.record_wall_time {
        record.analysis_wall_time_s = Some(started.elapsed().as_secs_f64());
    }

    let plan_for = |across: f64| -> CycleSchedule {
        let cmd = PointingCommand {
            tile_index: None,
            across_track_deg: across,
            along_track_slew_deg: cfg.lookahead_angle_deg,
            fallback: false,
        };
        plan_cycle(&geom, &budgets, &cfg.agility, &cmd, cfg.overlap, cfg.margin_s)
    };
    let scores = tile_scores(
        &product,
        cfg.policy,
        cfg.n_tiles,
        cfg.max_across_track_deg,
        &cfg.orbit,
        &footprint,
        |offset| plan_for(offset).feasible,
    )
    .map_err(|e| e.to_string())?;
    let mut command = select_target(&scores, cfg.policy, cfg.lookahead_angle_deg);
    let mut schedule = plan_cycle(&geom, &budgets, &cfg.agility, &command, cfg.overlap, cfg.margin_s);
    if !schedule.feasible && !command.fallback {
        command = PointingCommand::nadir_fallback(cfg.lookahead_angle_deg);
        schedule = plan_cycle(&geom, &budgets, &cfg.agility, &command, cfg.overlap, cfg.margin_s);
    }

    record.tile_scores = scores;
    record.chosen_tile = command.tile_index;
    record.across_track_deg = command.across_track_deg;
    record.fallback = command.fallback;
    record.critical_path_s = schedule.critical_path_s;
    record.deadline_s = schedule.deadline_s;
    record.slack_s = schedule.slack_s();
    record.overlap_used = schedule.overlap_used;
    record.feasible = schedule.feasible;
    record.phases = schedule.phases;

    let outcome = capture_nadir(scene, cfg, command.across_track_deg)?;
    apply_nadir(&mut record, outcome, cfg);
    Ok(record)
}

/// Nadir-only control: no lookahead, always the center tile.
pub fn run_baseline(scene: &GroundTruthScene, cfg: &CycleConfig, cycle_id: u64, seed: u64) -> CycleRecord {
    let record = CycleRecord::empty(cycle_id, CycleMode::Baseline, seed, cfg, scene);
    match baseline_cycle(scene, cfg, record.clone()) {
        Ok(r) => r,
        Err(e) => record.fail(e),
    }
}

fn baseline_cycle(scene: &GroundTruthScene, cfg: &CycleConfig, mut record: CycleRecord) -> Result<CycleRecord, String> {
    let geom = lead_time(&cfg.orbit, cfg.lookahead_angle_deg).map_err(|e| e.to_string())?;
    record.geometry = Some(geom);
    let b = &cfg.budgets;
    let mut t = geom.lead_time_s;
    for (phase, duration) in [
        (PhaseKind::NadirAcquire, b.nadir_acquire_s),
        (PhaseKind::NadirAnalyze, b.nadir_analyze_s),
        (PhaseKind::Downlink, b.downlink_s),
    ] {
        record.phases.push(Phase {
            phase,
            start_s: t,
            end_s: t + duration,
        });
        t += duration;
    }
    record.deadline_s = geom.lead_time_s - cfg.margin_s;
    record.slack_s = record.deadline_s;
    record.feasible = true;
    record.chosen_tile = Some(cfg.n_tiles / 2);
    let outcome = capture_nadir(scene, cfg, 0.0)?;
    apply_nadir(&mut record, outcome, cfg);
    Ok(record)
}
