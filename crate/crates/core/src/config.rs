//! Mission configuration: a sectioned TOML file. Every section and key is
//! optional and falls back to the defaults below; unknown keys are errors.
//!
//! ```toml
//! seed = 7
//! n_cycles = 200
//! workers = 4
//!
//! [orbit]
//! altitude_km = 500.0
//! ground_speed_km_s = 7.5
//!
//! [lookahead]
//! angle_deg = 45.0
//!
//! [policy]
//! name = "cloud_avoid"
//!
//! [output]
//! log = "events.jsonl"
//! metrics = "metrics.csv"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::Thresholds;
use crate::executor::{CycleConfig, PhaseBudget, SpacecraftAgility};
use crate::geometry::OrbitConfig;
use crate::sensor::ReadoutModel;
use crate::targeting::Policy;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config value `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LookaheadSection {
    pub angle_deg: f64,
    pub overlap: bool,
    pub margin_s: f64,
}

impl Default for LookaheadSection {
    fn default() -> Self {
        Self {
            angle_deg: 45.0,
            overlap: true,
            margin_s: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicySection {
    pub name: Policy,
    pub cloud_free_threshold: f64,
    /// Unset means on for the cloud policies and off for thermal hunting.
    pub stretch: Option<bool>,
    pub stretch_low_pct: f64,
    pub stretch_high_pct: f64,
}

impl Default for PolicySection {
    fn default() -> Self {
        Self {
            name: Policy::CloudAvoid,
            cloud_free_threshold: 0.1,
            stretch: None,
            stretch_low_pct: 1.0,
            stretch_high_pct: 99.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TileSection {
    pub count: usize,
    pub max_across_track_deg: f64,
}

impl Default for TileSection {
    fn default() -> Self {
        Self {
            count: 5,
            max_across_track_deg: 15.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorSection {
    pub decimation: usize,
    pub bands: Vec<usize>,
    pub smear: bool,
    pub record_wall_time: bool,
}

impl Default for SensorSection {
    fn default() -> Self {
        Self {
            decimation: 2,
            bands: vec![0, 1, 2, 3],
            smear: false,
            record_wall_time: false,
        }
    }
}

/// Scene generator parameters. The scene is `tiles.count` tiles wide and
/// one tile high, centered on the cycle's target point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneSection {
    pub tile_px: usize,
    pub gsd_km: f64,
    pub coverage: f64,
    pub correlation_px: f64,
    pub n_hotspots: usize,
    pub hotspot_sigma_px: f64,
    pub background_level: f64,
    pub min_separation_px: f64,
}

impl Default for SceneSection {
    fn default() -> Self {
        Self {
            tile_px: 64,
            gsd_km: 0.5,
            coverage: 0.5,
            correlation_px: 64.0,
            n_hotspots: 2,
            hotspot_sigma_px: 3.0,
            background_level: 0.2,
            min_separation_px: 12.0,
        }
    }
}

impl SceneSection {
    pub fn tile_km(&self) -> f64 {
        self.tile_px as f64 * self.gsd_km
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub log: PathBuf,
    pub metrics: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            log: PathBuf::from("events.jsonl"),
            metrics: PathBuf::from("metrics.csv"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MissionConfig {
    pub seed: u64,
    pub n_cycles: usize,
    /// Worker threads; 0 picks the machine default. Output never depends on it.
    pub workers: usize,
    pub orbit: OrbitConfig,
    pub lookahead: LookaheadSection,
    pub policy: PolicySection,
    pub thresholds: Thresholds,
    pub tiles: TileSection,
    pub agility: SpacecraftAgility,
    pub budgets: PhaseBudget,
    pub readout: ReadoutModel,
    pub sensor: SensorSection,
    pub scene: SceneSection,
    pub output: OutputSection,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_cycles: 200,
            workers: 0,
            orbit: OrbitConfig::default(),
            lookahead: LookaheadSection::default(),
            policy: PolicySection::default(),
            thresholds: Thresholds::default(),
            tiles: TileSection::default(),
            agility: SpacecraftAgility::default(),
            budgets: PhaseBudget::default(),
            readout: ReadoutModel::default(),
            sensor: SensorSection::default(),
            scene: SceneSection::default(),
            output: OutputSection::default(),
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be > 0, got {v}")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be >= 0, got {v}")))
    }
}

fn unit(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(field, format!("must be in [0, 1], got {v}")))
    }
}

impl MissionConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let o = &self.orbit;
        positive("orbit.altitude_km", o.altitude_km)?;
        positive("orbit.ground_speed_km_s", o.ground_speed_km_s)?;
        positive("orbit.earth_radius_km", o.earth_radius_km)?;

        let l = &self.lookahead;
        if !(40.0..=50.0).contains(&l.angle_deg) {
            return Err(invalid(
                "lookahead.angle_deg",
                format!("must be in [40, 50], got {}", l.angle_deg),
            ));
        }
        let horizon = o.max_look_angle_deg();
        if l.angle_deg >= horizon {
            return Err(invalid(
                "lookahead.angle_deg",
                format!("{} is beyond the usable limit {horizon:.3} for this orbit", l.angle_deg),
            ));
        }
        non_negative("lookahead.margin_s", l.margin_s)?;

        let p = &self.policy;
        unit("policy.cloud_free_threshold", p.cloud_free_threshold)?;
        if !(0.0..=100.0).contains(&p.stretch_low_pct) || !(0.0..=100.0).contains(&p.stretch_high_pct) {
            return Err(invalid("policy.stretch_low_pct", "percentiles must be in [0, 100]"));
        }
        if p.stretch_low_pct >= p.stretch_high_pct {
            return Err(invalid("policy.stretch_high_pct", "must exceed policy.stretch_low_pct"));
        }

        let t = &self.thresholds;
        for (field, v) in [
            ("thresholds.t_bright", t.t_bright),
            ("thresholds.t_sat", t.t_sat),
            ("thresholds.t_hot", t.t_hot),
        ] {
            unit(field, v)?;
        }
        positive("thresholds.t_ratio", t.t_ratio)?;
        positive("thresholds.sam_threshold_rad", t.sam_threshold_rad)?;

        if self.tiles.count == 0 || self.tiles.count.is_multiple_of(2) {
            return Err(invalid(
                "tiles.count",
                format!("must be odd and >= 1, got {}", self.tiles.count),
            ));
        }
        positive("tiles.max_across_track_deg", self.tiles.max_across_track_deg)?;
        if self.tiles.max_across_track_deg >= 90.0 {
            return Err(invalid("tiles.max_across_track_deg", "must be < 90"));
        }

        let a = &self.agility;
        positive("agility.max_rate_deg_s", a.max_rate_deg_s)?;
        positive("agility.max_accel_deg_s2", a.max_accel_deg_s2)?;
        non_negative("agility.settle_time_s", a.settle_time_s)?;

        let b = &self.budgets;
        for (field, v) in [
            ("budgets.acquire_s", b.acquire_s),
            ("budgets.transfer_s", b.transfer_s),
            ("budgets.analyze_s", b.analyze_s),
            ("budgets.decide_s", b.decide_s),
            ("budgets.nadir_acquire_s", b.nadir_acquire_s),
            ("budgets.nadir_analyze_s", b.nadir_analyze_s),
            ("budgets.downlink_s", b.downlink_s),
        ] {
            non_negative(field, v)?;
        }

        let r = &self.readout;
        positive("readout.bytes_per_sample", r.bytes_per_sample)?;
        positive("readout.link_rate_bytes_s", r.link_rate_bytes_s)?;
        non_negative("readout.fixed_overhead_s", r.fixed_overhead_s)?;

        let s = &self.sensor;
        if s.decimation == 0 {
            return Err(invalid("sensor.decimation", "must be >= 1"));
        }
        if s.bands.is_empty() {
            return Err(invalid("sensor.bands", "must list at least one band"));
        }
        if let Some(&b) = s.bands.iter().find(|&&b| b > 3) {
            return Err(invalid("sensor.bands", format!("band {b} out of range 0..=3")));
        }
        let needed: &[usize] = if p.name.uses_clouds() { &[0, 1, 2] } else { &[0, 3] };
        if let Some(b) = needed.iter().find(|b| !s.bands.contains(b)) {
            return Err(invalid(
                "sensor.bands",
                format!("policy {} needs band {b} in the lookahead capture", p.name.name()),
            ));
        }
        if s.bands.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("sensor.bands", "must be strictly increasing"));
        }

        let sc = &self.scene;
        if sc.tile_px == 0 {
            return Err(invalid("scene.tile_px", "must be >= 1"));
        }
        positive("scene.gsd_km", sc.gsd_km)?;
        unit("scene.coverage", sc.coverage)?;
        if !(sc.correlation_px.is_finite() && sc.correlation_px >= 1.0) {
            return Err(invalid(
                "scene.correlation_px",
                format!("must be >= 1, got {}", sc.correlation_px),
            ));
        }
        positive("scene.hotspot_sigma_px", sc.hotspot_sigma_px)?;
        if !(0.0..0.9).contains(&sc.background_level) {
            return Err(invalid("scene.background_level", "must be in [0, 0.9)"));
        }
        non_negative("scene.min_separation_px", sc.min_separation_px)?;
        Ok(())
    }

    /// Nadir field of view that images exactly one tile at nadir.
    pub fn nadir_fov_deg(&self) -> f64 {
        2.0 * (0.5 * self.scene.tile_km() / self.orbit.altitude_km)
            .atan()
            .to_degrees()
    }

    pub fn cycle_config(&self) -> CycleConfig {
        let p = &self.policy;
        let stretch = p.stretch.unwrap_or(p.name.uses_clouds());
        CycleConfig {
            orbit: self.orbit,
            lookahead_angle_deg: self.lookahead.angle_deg,
            policy: p.name,
            thresholds: self.thresholds,
            n_tiles: self.tiles.count,
            max_across_track_deg: self.tiles.max_across_track_deg,
            agility: self.agility,
            budgets: self.budgets,
            readout: self.readout,
            decimation: self.sensor.decimation,
            band_subset: self.sensor.bands.clone(),
            stretch: stretch.then_some((p.stretch_low_pct, p.stretch_high_pct)),
            overlap: self.lookahead.overlap,
            margin_s: self.lookahead.margin_s,
            smear: self.sensor.smear,
            nadir_fov_deg: self.nadir_fov_deg(),
            cloud_free_threshold: p.cloud_free_threshold,
            record_wall_time: self.sensor.record_wall_time,
        }
    }
}
