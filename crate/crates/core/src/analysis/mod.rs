//! Onboard image-analysis kernels.
//!
//! Kernels operate on [`SceneRaster`] images with bands ordered R, G, B, NIR
//! where a band layout matters. All thresholds are surrogate defaults, not
//! values tuned on flight data.

mod cloud;
mod nnls;
mod spectral;
mod stretch;
mod thermal;

pub use cloud::{cloud_mask, CloudMask};
pub use nnls::{nnls, unmix, Unmixing};
pub use spectral::{matched_filter, spectral_angle, BackgroundStats, MatchedFilter, SpectralAngleScorer};
pub use stretch::{percentile, stretch};
pub use thermal::{thermal_anomalies, ThermalDetection};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scene::raster_io::{RasterError, RasterGrid};
use crate::scene::SceneRaster;

pub const DEFAULT_COVARIANCE_EPSILON: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("expected {expected} bands, got {found}")]
    BandCount { expected: usize, found: usize },
    #[error("vector length {found} does not match {expected} bands")]
    LengthMismatch { expected: usize, found: usize },
    #[error("spectral angle undefined for a zero vector")]
    ZeroVector,
    #[error("target spectrum equals the background mean")]
    DegenerateTarget,
    #[error("regularized covariance is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid percentiles ({low}, {high}); need 0 <= low < high <= 100")]
    InvalidPercentiles { low: f64, high: f64 },
}

/// Thresholds for the surrogate detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub t_bright: f64,
    pub t_sat: f64,
    pub t_hot: f64,
    pub t_ratio: f64,
    pub sam_threshold_rad: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            t_bright: 0.6,
            t_sat: 0.2,
            t_hot: 0.8,
            t_ratio: 2.0,
            sam_threshold_rad: 0.15,
        }
    }
}

/// Per-pixel scoring function over a band vector. Any detector (including
/// a learned one) can be plugged into [`score_map`] through this trait.
pub trait PixelScorer: Sync {
    fn score(&self, pixel: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64 + Sync> PixelScorer for F {
    fn score(&self, pixel: &[f64]) -> f64 {
        self(pixel)
    }
}

/// Real-valued map, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    pub width: usize,
    pub height: usize,
    pub scores: Vec<f64>,
}

impl ScoreMap {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.scores[row * self.width + col]
    }

    pub fn to_grid(&self) -> Result<RasterGrid, RasterError> {
        RasterGrid::new(
            self.width,
            self.height,
            1,
            self.scores.iter().map(|&s| s as f32).collect(),
        )
    }
}

/// Scores every pixel. Rows are processed in parallel and collected in row
/// order, so the result does not depend on the worker count.
pub fn score_map(image: &SceneRaster, scorer: &dyn PixelScorer) -> ScoreMap {
    let (w, h) = (image.width(), image.height());
    let rows: Vec<Vec<f64>> = (0..h)
        .into_par_iter()
        .map(|r| {
            let mut px = vec![0.0; image.bands()];
            (0..w)
                .map(|c| {
                    for (b, v) in px.iter_mut().enumerate() {
                        *v = image.get(b, r, c) as f64;
                    }
                    scorer.score(&px)
                })
                .collect()
        })
        .collect();
    ScoreMap {
        width: w,
        height: h,
        scores: rows.concat(),
    }
}

/// Output of the lookahead analysis consumed by targeting.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisProduct {
    Cloud(CloudMask),
    Thermal {
        width: usize,
        height: usize,
        detections: Vec<ThermalDetection>,
    },
}

impl AnalysisProduct {
    pub fn width(&self) -> usize {
        match self {
            AnalysisProduct::Cloud(m) => m.width,
            AnalysisProduct::Thermal { width, .. } => *width,
        }
    }

    pub fn height(&self) -> usize {
        match self {
            AnalysisProduct::Cloud(m) => m.height,
            AnalysisProduct::Thermal { height, .. } => *height,
        }
    }
}

pub(crate) fn expect_bands(image: &SceneRaster, expected: usize) -> Result<(), AnalysisError> {
    if image.bands() != expected {
        return Err(AnalysisError::BandCount {
            expected,
            found: image.bands(),
        });
    }
    Ok(())
}
