//! Image capture from a ground-truth scene and the instrument readout model.
//!
//! Capture crops by pixel center (no interpolation), then keeps every
//! `decimation`-th row and column starting from the crop's top-left pixel,
//! then selects bands. Every output sample is a verbatim scene sample.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GroundFootprint;
use crate::scene::{SceneError, SceneRaster};

#[derive(Debug, Error)]
pub enum SensorError {
    #[error("footprint does not overlap the scene")]
    NoCoverage,
    #[error("invalid capture request: {0}")]
    InvalidRequest(String),
    #[error("invalid readout model: {0}")]
    InvalidReadout(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureRequest {
    pub footprint: GroundFootprint,
    /// Keep every k-th pixel along each axis.
    pub decimation: usize,
    pub band_subset: Vec<usize>,
    /// Pixel-smearing wide-FOV emulation. Accepted but not modeled; the
    /// executor logs it as requested/ignored.
    #[serde(default)]
    pub smear: bool,
}

impl CaptureRequest {
    pub fn new(footprint: GroundFootprint, decimation: usize, band_subset: Vec<usize>) -> Self {
        Self {
            footprint,
            decimation,
            band_subset,
            smear: false,
        }
    }

    pub fn validate(&self, bands: usize) -> Result<(), SensorError> {
        if self.decimation == 0 {
            return Err(SensorError::InvalidRequest("decimation must be >= 1".into()));
        }
        if self.band_subset.is_empty() {
            return Err(SensorError::InvalidRequest("band_subset must not be empty".into()));
        }
        for (i, &b) in self.band_subset.iter().enumerate() {
            if b >= bands {
                return Err(SensorError::InvalidRequest(format!(
                    "band {b} out of range for {bands} bands"
                )));
            }
            if self.band_subset[..i].contains(&b) {
                return Err(SensorError::InvalidRequest(format!("band {b} listed twice")));
            }
        }
        let fp = &self.footprint;
        if !(fp.along_track_extent_km > 0.0 && fp.across_track_extent_km > 0.0) {
            return Err(SensorError::InvalidRequest("footprint extents must be > 0".into()));
        }
        Ok(())
    }
}

/// Pixel window `[row0, row1) x [col0, col1)` of a scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelWindow {
    pub row0: usize,
    pub row1: usize,
    pub col0: usize,
    pub col1: usize,
}

impl PixelWindow {
    pub fn rows(&self) -> usize {
        self.row1 - self.row0
    }

    pub fn cols(&self) -> usize {
        self.col1 - self.col0
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.row0..self.row1).contains(&row) && (self.col0..self.col1).contains(&col)
    }
}

/// First index whose pixel center is at or beyond `edge_km`.
fn center_index(edge_km: f64, origin_km: f64, gsd_km: f64, len: usize) -> usize {
    let k = ((edge_km - origin_km) / gsd_km - 0.5).ceil();
    if k <= 0.0 {
        0
    } else {
        (k as usize).min(len)
    }
}

/// Scene pixels whose centers fall inside the footprint.
pub fn footprint_window(scene: &SceneRaster, footprint: &GroundFootprint) -> Result<PixelWindow, SensorError> {
    let (origin_along, origin_across) = scene.origin_km();
    let gsd = scene.gsd_km();
    let (a0, a1) = footprint.along_bounds();
    let (x0, x1) = footprint.across_bounds();
    let w = PixelWindow {
        row0: center_index(a0, origin_along, gsd, scene.height()),
        row1: center_index(a1, origin_along, gsd, scene.height()),
        col0: center_index(x0, origin_across, gsd, scene.width()),
        col1: center_index(x1, origin_across, gsd, scene.width()),
    };
    if w.row0 >= w.row1 || w.col0 >= w.col1 {
        return Err(SensorError::NoCoverage);
    }
    Ok(w)
}

pub fn capture(scene: &SceneRaster, req: &CaptureRequest) -> Result<SceneRaster, SensorError> {
    req.validate(scene.bands())?;
    let window = footprint_window(scene, &req.footprint)?;
    let k = req.decimation;
    let out_h = window.rows().div_ceil(k);
    let out_w = window.cols().div_ceil(k);
    let mut values = Vec::with_capacity(out_h * out_w * req.band_subset.len());
    for &band in &req.band_subset {
        for r in (window.row0..window.row1).step_by(k) {
            for c in (window.col0..window.col1).step_by(k) {
                values.push(scene.get(band, r, c));
            }
        }
    }
    let (oa, ox) = scene.origin_km();
    let gsd = scene.gsd_km();
    Ok(SceneRaster::new(out_w, out_h, req.band_subset.len(), values)?.with_geo(
        gsd * k as f64,
        (oa + window.row0 as f64 * gsd, ox + window.col0 as f64 * gsd),
    )?)
}

/// Instrument-to-processor transfer model.
///
/// The defaults are illustrative, not measured instrument figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutModel {
    pub bytes_per_sample: f64,
    pub link_rate_bytes_s: f64,
    pub fixed_overhead_s: f64,
}

impl Default for ReadoutModel {
    fn default() -> Self {
        Self {
            bytes_per_sample: 2.0,
            link_rate_bytes_s: 8_000_000.0,
            fixed_overhead_s: 0.5,
        }
    }
}

impl ReadoutModel {
    pub fn validate(&self) -> Result<(), SensorError> {
        if !(self.bytes_per_sample.is_finite() && self.bytes_per_sample > 0.0) {
            return Err(SensorError::InvalidReadout("bytes_per_sample must be > 0".into()));
        }
        if !(self.link_rate_bytes_s.is_finite() && self.link_rate_bytes_s > 0.0) {
            return Err(SensorError::InvalidReadout("link_rate_bytes_s must be > 0".into()));
        }
        if !(self.fixed_overhead_s.is_finite() && self.fixed_overhead_s >= 0.0) {
            return Err(SensorError::InvalidReadout("fixed_overhead_s must be >= 0".into()));
        }
        Ok(())
    }

    /// Seconds spent moving sample data, excluding the fixed overhead.
    pub fn pixel_term(&self, pixels: u64, bands: u64) -> f64 {
        pixels as f64 * bands as f64 * self.bytes_per_sample / self.link_rate_bytes_s
    }
}

pub fn readout_time(pixels: u64, bands: u64, model: &ReadoutModel) -> f64 {
    model.pixel_term(pixels, bands) + model.fixed_overhead_s
}

/// Pixels kept from a `rows x cols` frame at decimation `k`.
pub fn decimated_pixels(rows: u64, cols: u64, k: u64) -> u64 {
    rows.div_ceil(k) * cols.div_ceil(k)
}
