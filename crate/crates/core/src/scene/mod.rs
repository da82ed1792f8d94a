//! Ground-truth scenes: the raster type, seeded generators and file I/O.

mod generate;
pub mod raster_io;
pub mod truth;

pub use generate::{
    generate_cloud_field, generate_spectral_scene, generate_thermal_scene, render_cloud_scene, CloudField,
    GroundSpectrum, Hotspot, SpectralScene, ThermalScene, ThermalSceneParams,
};
pub use raster_io::{read_grid, read_raster, write_grid, write_raster, RasterGrid};

use serde::Serialize;
use thiserror::Error;

pub const BAND_RED: usize = 0;
pub const BAND_GREEN: usize = 1;
pub const BAND_BLUE: usize = 2;
pub const BAND_NIR: usize = 3;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("raster dimensions must be >= 1 (got {width}x{height}x{bands})")]
    EmptyDimensions { width: usize, height: usize, bands: usize },
    #[error("expected {expected} samples for the declared dimensions, got {found}")]
    SampleCount { expected: usize, found: usize },
    #[error("sample {index} = {value} is not a finite value in [0, 1]")]
    SampleOutOfRange { index: usize, value: f32 },
    #[error("gsd_km must be positive and finite, got {0}")]
    InvalidGsd(f64),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid endmember library: {0}")]
    InvalidLibrary(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

fn param_err(name: &'static str, reason: impl Into<String>) -> SceneError {
    SceneError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Gridded multi-band scene. Samples are band-sequential, row-major within
/// a band. Rows run along-track, columns across-track; `origin_km` is the
/// outer corner of pixel (0, 0) as `(along_track, across_track)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneRaster {
    width: usize,
    height: usize,
    bands: usize,
    gsd_km: f64,
    origin_km: (f64, f64),
    values: Vec<f32>,
}

impl SceneRaster {
    pub fn new(width: usize, height: usize, bands: usize, values: Vec<f32>) -> Result<Self, SceneError> {
        if width == 0 || height == 0 || bands == 0 {
            return Err(SceneError::EmptyDimensions { width, height, bands });
        }
        let expected = width * height * bands;
        if values.len() != expected {
            return Err(SceneError::SampleCount {
                expected,
                found: values.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(SceneError::SampleOutOfRange { index, value });
        }
        Ok(Self {
            width,
            height,
            bands,
            gsd_km: 1.0,
            origin_km: (0.0, 0.0),
            values,
        })
    }

    pub fn filled(width: usize, height: usize, bands: usize, value: f32) -> Result<Self, SceneError> {
        Self::new(width, height, bands, vec![value; width * height * bands])
    }

    pub fn with_geo(mut self, gsd_km: f64, origin_km: (f64, f64)) -> Result<Self, SceneError> {
        if !(gsd_km.is_finite() && gsd_km > 0.0) {
            return Err(SceneError::InvalidGsd(gsd_km));
        }
        self.gsd_km = gsd_km;
        self.origin_km = origin_km;
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn gsd_km(&self) -> f64 {
        self.gsd_km
    }

    pub fn origin_km(&self) -> (f64, f64) {
        self.origin_km
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }

    #[inline]
    pub fn index(&self, band: usize, row: usize, col: usize) -> usize {
        band * self.width * self.height + row * self.width + col
    }

    #[inline]
    pub fn get(&self, band: usize, row: usize, col: usize) -> f32 {
        self.values[self.index(band, row, col)]
    }

    pub fn band(&self, band: usize) -> &[f32] {
        let n = self.pixels();
        &self.values[band * n..(band + 1) * n]
    }

    /// All bands of one pixel, widened to f64.
    pub fn pixel(&self, row: usize, col: usize) -> Vec<f64> {
        (0..self.bands).map(|b| self.get(b, row, col) as f64).collect()
    }

    /// Ground coordinates `(along, across)` of a pixel center.
    pub fn pixel_center_km(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin_km.0 + (row as f64 + 0.5) * self.gsd_km,
            self.origin_km.1 + (col as f64 + 0.5) * self.gsd_km,
        )
    }

    /// Ground extent `(along, across)` in km.
    pub fn extent_km(&self) -> (f64, f64) {
        (self.height as f64 * self.gsd_km, self.width as f64 * self.gsd_km)
    }

    pub fn to_grid(&self) -> RasterGrid {
        RasterGrid {
            width: self.width,
            height: self.height,
            bands: self.bands,
            values: self.values.clone(),
        }
    }

    /// SHA-256 of the raster's file encoding, hex.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(raster_io::encode(&self.to_grid()));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Reference spectra for unmixing and target detection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndmemberLibrary {
    names: Vec<String>,
    spectra: Vec<Vec<f64>>,
}

impl EndmemberLibrary {
    pub fn new(names: Vec<String>, spectra: Vec<Vec<f64>>) -> Result<Self, SceneError> {
        if spectra.is_empty() {
            return Err(SceneError::InvalidLibrary("at least one endmember is required".into()));
        }
        if names.len() != spectra.len() {
            return Err(SceneError::InvalidLibrary(format!(
                "{} names for {} spectra",
                names.len(),
                spectra.len()
            )));
        }
        let bands = spectra[0].len();
        if bands == 0 {
            return Err(SceneError::InvalidLibrary("spectra must have at least one band".into()));
        }
        for (i, s) in spectra.iter().enumerate() {
            if s.len() != bands {
                return Err(SceneError::InvalidLibrary(format!(
                    "endmember {i} has {} bands, expected {bands}",
                    s.len()
                )));
            }
            if s.iter().any(|v| !(v.is_finite() && (0.0..=1.0).contains(v))) {
                return Err(SceneError::InvalidLibrary(format!(
                    "endmember {i} has samples outside [0, 1]"
                )));
            }
            if s.iter().all(|&v| v == 0.0) {
                return Err(SceneError::InvalidLibrary(format!("endmember {i} is the zero vector")));
            }
            if spectra[..i].iter().any(|other| other == s) {
                return Err(SceneError::InvalidLibrary(format!(
                    "endmember {i} duplicates an earlier spectrum"
                )));
            }
        }
        Ok(Self { names, spectra })
    }

    /// Library with generated names `em0`, `em1`, ...
    pub fn from_spectra(spectra: Vec<Vec<f64>>) -> Result<Self, SceneError> {
        let names = (0..spectra.len()).map(|i| format!("em{i}")).collect();
        Self::new(names, spectra)
    }

    pub fn len(&self) -> usize {
        self.spectra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectra.is_empty()
    }

    pub fn bands(&self) -> usize {
        self.spectra[0].len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn spectra(&self) -> &[Vec<f64>] {
        &self.spectra
    }

    /// `E * a`, one entry per band.
    pub fn mix(&self, abundances: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.bands()];
        for (spectrum, &a) in self.spectra.iter().zip(abundances) {
            for (o, &s) in out.iter_mut().zip(spectrum) {
                *o += s * a;
            }
        }
        out
    }
}
