use serde::{Deserialize, Serialize};

use super::{param_err, EndmemberLibrary, SceneError, SceneRaster, BAND_NIR};
use crate::rng::SimRng;

/// Largest f32 strictly below 0.5.
const CLEAR_CEILING: f32 = 0.499_999_97;

/// One-band cloud opacity field plus the realized cloudy-pixel count.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudField {
    pub raster: SceneRaster,
    pub cloudy_pixels: usize,
}

impl CloudField {
    pub fn cloud_fraction(&self) -> f64 {
        self.cloudy_pixels as f64 / self.raster.pixels() as f64
    }

    pub fn is_cloudy(&self, row: usize, col: usize) -> bool {
        self.raster.get(0, row, col) > 0.5
    }
}

/// Seeded cloud opacity field.
///
/// White noise from [`SimRng`] (one draw per pixel, row-major) is smoothed
/// with a separable, edge-normalized box filter of width
/// `round(correlation_px)`. Pixels are ranked by smoothed value, ties broken
/// by pixel index, and the top `round(coverage * W * H)` ranks become cloudy.
/// Opacity is assigned by rank: clear pixels spread over `[0, 0.5)`, cloudy
/// ones over `(0.5, 1]`.
pub fn generate_cloud_field(
    seed: u64,
    width: usize,
    height: usize,
    coverage: f64,
    correlation_px: f64,
) -> Result<CloudField, SceneError> {
    if !coverage.is_finite() || !(0.0..=1.0).contains(&coverage) {
        return Err(param_err("coverage", format!("must be in [0, 1], got {coverage}")));
    }
    if !correlation_px.is_finite() || correlation_px < 1.0 {
        return Err(param_err(
            "correlation_px",
            format!("must be >= 1, got {correlation_px}"),
        ));
    }
    if width == 0 || height == 0 {
        return Err(SceneError::EmptyDimensions {
            width,
            height,
            bands: 1,
        });
    }
    let n = width * height;
    let mut rng = SimRng::new(seed);
    let noise: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
    let window = (correlation_px.round() as usize).max(1);
    let smooth = box_filter(
        &box_filter(&noise, width, height, window, true),
        width,
        height,
        window,
        false,
    );

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| smooth[a].total_cmp(&smooth[b]).then(a.cmp(&b)));

    let cloudy = ((coverage * n as f64).round() as usize).min(n);
    let clear = n - cloudy;
    let mut values = vec![0f32; n];
    for (rank, &idx) in order.iter().enumerate() {
        values[idx] = if rank < clear {
            ((0.5 * rank as f64 / clear as f64) as f32).min(CLEAR_CEILING)
        } else {
            let j = rank - clear;
            (0.5 + 0.5 * (j + 1) as f64 / cloudy as f64) as f32
        };
    }
    Ok(CloudField {
        raster: SceneRaster::new(width, height, 1, values)?,
        cloudy_pixels: cloudy,
    })
}

/// Running mean along rows (`horizontal`) or columns; the window is
/// clipped at the edges and normalized by the in-bounds count.
fn box_filter(src: &[f64], width: usize, height: usize, window: usize, horizontal: bool) -> Vec<f64> {
    let (lines, len) = if horizontal { (height, width) } else { (width, height) };
    let at = |line: usize, k: usize| if horizontal { line * width + k } else { k * width + line };
    let before = window / 2;
    let mut out = vec![0.0; src.len()];
    let mut prefix = vec![0.0; len + 1];
    for line in 0..lines {
        for k in 0..len {
            prefix[k + 1] = prefix[k] + src[at(line, k)];
        }
        for k in 0..len {
            let lo = k.saturating_sub(before);
            let hi = (k + window - before).min(len);
            out[at(line, k)] = (prefix[hi] - prefix[lo]) / (hi - lo) as f64;
        }
    }
    out
}

/// Clear-sky surface reflectance used when rendering cloud scenes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundSpectrum {
    pub red: f32,
    pub green: f32,
    pub blue: f32,
    pub nir: f32,
}

impl Default for GroundSpectrum {
    fn default() -> Self {
        Self {
            red: 0.12,
            green: 0.16,
            blue: 0.08,
            nir: 0.35,
        }
    }
}

/// Renders a cloud field as a 4-band R,G,B,NIR scene: cloudy pixels are
/// bright and white (`0.8 + 0.2 * opacity` in every band), clear pixels are
/// the ground spectrum plus a faint haze term `0.1 * opacity`.
pub fn render_cloud_scene(field: &CloudField, ground: GroundSpectrum) -> SceneRaster {
    let src = &field.raster;
    let n = src.pixels();
    let ground = [ground.red, ground.green, ground.blue, ground.nir];
    let mut values = vec![0f32; 4 * n];
    for (i, &o) in src.band(0).iter().enumerate() {
        for (b, &g) in ground.iter().enumerate() {
            values[b * n + i] = if o > 0.5 {
                0.8 + 0.2 * o
            } else {
                (g + 0.1 * o).clamp(0.0, 1.0)
            };
        }
    }
    SceneRaster::new(src.width(), src.height(), 4, values)
        .expect("rendered samples are in [0, 1]")
        .with_geo(src.gsd_km(), src.origin_km())
        .expect("gsd carried over from a valid raster")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalSceneParams {
    pub width: usize,
    pub height: usize,
    pub n_hotspots: usize,
    pub hotspot_sigma_px: f64,
    pub background_level: f64,
    /// Rejection-sampling distance between hotspot centers. After 1000
    /// failed draws for one hotspot the last draw is kept.
    pub min_separation_px: f64,
}

impl Default for ThermalSceneParams {
    fn default() -> Self {
        Self {
            width: 64,
            height: 64,
            n_hotspots: 3,
            hotspot_sigma_px: 2.0,
            background_level: 0.2,
            min_separation_px: 12.0,
        }
    }
}

/// Ground-truth hotspot: integer pixel center, NIR peak amplitude, width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hotspot {
    pub id: usize,
    pub row: usize,
    pub col: usize,
    pub peak: f64,
    pub sigma_px: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalScene {
    pub raster: SceneRaster,
    pub hotspots: Vec<Hotspot>,
}

/// Gaussian kernels are truncated at this many sigmas.
const BLOB_RADIUS_SIGMAS: f64 = 4.0;

/// Uniform background in all four bands plus Gaussian blobs added to the
/// NIR band only. Peaks are drawn from `[0.9, 1.0)`; centers are integer
/// pixels. Samples are clipped to [0, 1].
pub fn generate_thermal_scene(seed: u64, params: &ThermalSceneParams) -> Result<ThermalScene, SceneError> {
    let ThermalSceneParams {
        width,
        height,
        n_hotspots,
        hotspot_sigma_px,
        background_level,
        min_separation_px,
    } = *params;
    if width == 0 || height == 0 {
        return Err(SceneError::EmptyDimensions {
            width,
            height,
            bands: 4,
        });
    }
    if !(hotspot_sigma_px.is_finite() && hotspot_sigma_px > 0.0) {
        return Err(param_err(
            "hotspot_sigma_px",
            format!("must be > 0, got {hotspot_sigma_px}"),
        ));
    }
    if !(background_level.is_finite() && (0.0..=1.0).contains(&background_level)) {
        return Err(param_err(
            "background_level",
            format!("must be in [0, 1], got {background_level}"),
        ));
    }
    if !(min_separation_px.is_finite() && min_separation_px >= 0.0) {
        return Err(param_err(
            "min_separation_px",
            format!("must be >= 0, got {min_separation_px}"),
        ));
    }

    let mut rng = SimRng::new(seed);
    let mut hotspots: Vec<Hotspot> = Vec::with_capacity(n_hotspots);
    for id in 0..n_hotspots {
        let mut attempt = 0;
        let (row, col) = loop {
            let row = rng.below(height as u64) as usize;
            let col = rng.below(width as u64) as usize;
            attempt += 1;
            let clear = hotspots.iter().all(|h| {
                let dr = h.row as f64 - row as f64;
                let dc = h.col as f64 - col as f64;
                (dr * dr + dc * dc).sqrt() >= min_separation_px
            });
            if clear || attempt >= 1000 {
                break (row, col);
            }
        };
        let peak = rng.uniform(0.9, 1.0);
        hotspots.push(Hotspot {
            id,
            row,
            col,
            peak,
            sigma_px: hotspot_sigma_px,
        });
    }

    let n = width * height;
    let mut nir = vec![background_level; n];
    let radius = BLOB_RADIUS_SIGMAS * hotspot_sigma_px;
    let reach = radius.ceil() as usize;
    let two_sigma_sq = 2.0 * hotspot_sigma_px * hotspot_sigma_px;
    for h in &hotspots {
        let (r0, r1) = (h.row.saturating_sub(reach), (h.row + reach + 1).min(height));
        let (c0, c1) = (h.col.saturating_sub(reach), (h.col + reach + 1).min(width));
        for r in r0..r1 {
            for c in c0..c1 {
                let dr = r as f64 - h.row as f64;
                let dc = c as f64 - h.col as f64;
                let d2 = dr * dr + dc * dc;
                if d2 <= radius * radius {
                    nir[r * width + c] += h.peak * libm::exp(-d2 / two_sigma_sq);
                }
            }
        }
    }

    let bg = background_level as f32;
    let mut values = vec![bg; 4 * n];
    for (dst, src) in values[BAND_NIR * n..].iter_mut().zip(&nir) {
        *dst = src.min(1.0) as f32;
    }
    Ok(ThermalScene {
        raster: SceneRaster::new(width, height, 4, values)?,
        hotspots,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScene {
    pub raster: SceneRaster,
    /// Per-pixel abundances, row-major.
    pub abundances: Vec<Vec<f64>>,
}

/// Linear mixing scene: each pixel is `E * a` plus Gaussian noise of
/// standard deviation `noise_sigma` per band (drawn pixel-major, band-minor),
/// clipped to [0, 1].
pub fn generate_spectral_scene(
    seed: u64,
    width: usize,
    height: usize,
    library: &EndmemberLibrary,
    abundance_map: &[Vec<f64>],
    noise_sigma: f64,
) -> Result<SpectralScene, SceneError> {
    if width == 0 || height == 0 {
        return Err(SceneError::EmptyDimensions {
            width,
            height,
            bands: library.bands(),
        });
    }
    if abundance_map.len() != width * height {
        return Err(SceneError::DimensionMismatch(format!(
            "abundance map has {} pixels, raster has {}",
            abundance_map.len(),
            width * height
        )));
    }
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(param_err("noise_sigma", format!("must be >= 0, got {noise_sigma}")));
    }
    for (i, a) in abundance_map.iter().enumerate() {
        if a.len() != library.len() {
            return Err(SceneError::DimensionMismatch(format!(
                "pixel {i} has {} abundances for {} endmembers",
                a.len(),
                library.len()
            )));
        }
        if a.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || a.iter().sum::<f64>() > 1.0 + 1e-12 {
            return Err(param_err(
                "abundance_map",
                format!("pixel {i} must be nonnegative with sum <= 1"),
            ));
        }
    }

    let bands = library.bands();
    let n = width * height;
    let mut rng = SimRng::new(seed);
    let mut values = vec![0f32; bands * n];
    for (i, a) in abundance_map.iter().enumerate() {
        let mixed = library.mix(a);
        for (b, m) in mixed.into_iter().enumerate() {
            let noisy = if noise_sigma > 0.0 {
                m + noise_sigma * rng.normal()
            } else {
                m
            };
            values[b * n + i] = noisy.clamp(0.0, 1.0) as f32;
        }
    }
    Ok(SpectralScene {
        raster: SceneRaster::new(width, height, bands, values)?,
        abundances: abundance_map.to_vec(),
    })
}
