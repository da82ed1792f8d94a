//! `DTRAST01` raster files.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  field
//! 0       8     magic "DTRAST01"
//! 8       4     u32 width
//! 12      4     u32 height
//! 16      4     u32 bands
//! 20      4*N   f32 samples, N = width*height*bands,
//!               band-sequential, row-major within each band
//! ```
//!
//! Geolocation (gsd, origin) is not part of the file; rasters read back
//! carry gsd 1 km and origin (0, 0).

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{SceneError, SceneRaster};

pub const MAGIC: &[u8; 8] = b"DTRAST01";
const HEADER_LEN: usize = 20;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic: expected DTRAST01")]
    BadMagic,
    #[error("truncated file: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("invalid header: {0}")]
    InvalidHeader(String),
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

/// File-level raster: any finite samples (score maps are not confined to
/// [0, 1]).
#[derive(Debug, Clone, PartialEq)]
pub struct RasterGrid {
    pub width: usize,
    pub height: usize,
    pub bands: usize,
    pub values: Vec<f32>,
}

impl RasterGrid {
    pub fn new(width: usize, height: usize, bands: usize, values: Vec<f32>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 || bands == 0 {
            return Err(RasterError::InvalidHeader(format!(
                "zero dimension {width}x{height}x{bands}"
            )));
        }
        if values.len() != width * height * bands {
            return Err(RasterError::InvalidHeader(format!(
                "{} samples for {width}x{height}x{bands}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(RasterError::NonFinite(i));
        }
        Ok(Self {
            width,
            height,
            bands,
            values,
        })
    }

    pub fn into_scene(self) -> Result<SceneRaster, SceneError> {
        SceneRaster::new(self.width, self.height, self.bands, self.values)
    }
}

pub fn encode(grid: &RasterGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * grid.values.len());
    out.extend_from_slice(MAGIC);
    for dim in [grid.width, grid.height, grid.bands] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    for v in &grid.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<RasterGrid, RasterError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(RasterError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(RasterError::Truncated {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().expect("4-byte slice")) as usize;
    let (width, height, bands) = (u32_at(8), u32_at(12), u32_at(16));
    if width == 0 || height == 0 || bands == 0 {
        return Err(RasterError::InvalidHeader(format!(
            "zero dimension {width}x{height}x{bands}"
        )));
    }
    let n = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(bands))
        .ok_or_else(|| RasterError::InvalidHeader("dimensions overflow".into()))?;
    let expected = n
        .checked_mul(4)
        .and_then(|b| b.checked_add(HEADER_LEN))
        .ok_or_else(|| RasterError::InvalidHeader("dimensions overflow".into()))?;
    if bytes.len() < expected {
        return Err(RasterError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(RasterError::TrailingBytes(bytes.len() - expected));
    }
    let values: Vec<f32> = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk")))
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(RasterError::NonFinite(i));
    }
    Ok(RasterGrid {
        width,
        height,
        bands,
        values,
    })
}

fn io_err(path: &Path, source: std::io::Error) -> RasterError {
    RasterError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_grid(grid: &RasterGrid, path: impl AsRef<Path>) -> Result<(), RasterError> {
    let path = path.as_ref();
    fs::write(path, encode(grid)).map_err(|e| io_err(path, e))
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<RasterGrid, RasterError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    decode(&bytes)
}

pub fn write_raster(raster: &SceneRaster, path: impl AsRef<Path>) -> Result<(), RasterError> {
    write_grid(&raster.to_grid(), path)
}

/// Reads a raster whose samples must lie in [0, 1].
pub fn read_raster(path: impl AsRef<Path>) -> Result<SceneRaster, RasterError> {
    Ok(read_grid(path)?.into_scene()?)
}
