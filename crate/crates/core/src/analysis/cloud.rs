use super::{expect_bands, AnalysisError};
use crate::scene::{SceneRaster, BAND_BLUE, BAND_GREEN, BAND_RED};

#[derive(Debug, Clone, PartialEq)]
pub struct CloudMask {
    pub width: usize,
    pub height: usize,
    /// Row-major.
    pub cloudy: Vec<bool>,
    pub cloud_fraction: f64,
}

impl CloudMask {
    pub fn from_grid(width: usize, height: usize, cloudy: Vec<bool>) -> Self {
        assert_eq!(cloudy.len(), width * height);
        let count = cloudy.iter().filter(|&&c| c).count();
        Self {
            width,
            height,
            cloud_fraction: count as f64 / cloudy.len() as f64,
            cloudy,
        }
    }

    pub fn is_cloudy(&self, row: usize, col: usize) -> bool {
        self.cloudy[row * self.width + col]
    }

    /// Cloudy fraction over the column range `[col0, col1)`, all rows.
    pub fn fraction_in_columns(&self, col0: usize, col1: usize) -> f64 {
        let cols = col1.saturating_sub(col0);
        if cols == 0 {
            return 0.0;
        }
        let count = (0..self.height)
            .flat_map(|r| (col0..col1).map(move |c| (r, c)))
            .filter(|&(r, c)| self.is_cloudy(r, c))
            .count();
        count as f64 / (cols * self.height) as f64
    }
}

/// Bright-and-white cloud test on a stretched R,G,B,NIR image: cloudy iff
/// `mean(R,G,B) > t_bright` and `(max - min) / max < t_sat` over R,G,B
/// (saturation is 0 when max is 0).
pub fn cloud_mask(image: &SceneRaster, t_bright: f64, t_sat: f64) -> Result<CloudMask, AnalysisError> {
    expect_bands(image, 4)?;
    let (r, g, b) = (image.band(BAND_RED), image.band(BAND_GREEN), image.band(BAND_BLUE));
    let cloudy = (0..image.pixels())
        .map(|i| {
            let (r, g, b) = (r[i] as f64, g[i] as f64, b[i] as f64);
            let brightness = (r + g + b) / 3.0;
            let max = r.max(g).max(b);
            let min = r.min(g).min(b);
            let saturation = if max > 0.0 { (max - min) / max } else { 0.0 };
            brightness > t_bright && saturation < t_sat
        })
        .collect();
    Ok(CloudMask::from_grid(image.width(), image.height(), cloudy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::stretch;
    use crate::scene::{generate_cloud_field, render_cloud_scene, GroundSpectrum};

    #[test]
    fn black_and_white() {
        let black = SceneRaster::filled(8, 8, 4, 0.0).unwrap();
        assert_eq!(cloud_mask(&black, 0.6, 0.2).unwrap().cloud_fraction, 0.0);
        let white = SceneRaster::filled(8, 8, 4, 1.0).unwrap();
        assert_eq!(cloud_mask(&white, 0.6, 0.2).unwrap().cloud_fraction, 1.0);
    }

    #[test]
    fn saturated_bright_pixel_is_not_cloud() {
        // Bright but strongly colored.
        let img = SceneRaster::new(1, 1, 4, vec![1.0, 1.0, 0.2, 0.5]).unwrap();
        assert!(!cloud_mask(&img, 0.6, 0.2).unwrap().cloudy[0]);
    }

    #[test]
    fn wrong_band_count() {
        let img = SceneRaster::filled(2, 2, 3, 0.5).unwrap();
        assert_eq!(
            cloud_mask(&img, 0.6, 0.2),
            Err(AnalysisError::BandCount { expected: 4, found: 3 })
        );
    }

    #[test]
    fn recovers_generated_coverage() {
        for (seed, coverage) in [(1, 0.5), (2, 0.2), (3, 0.8)] {
            let field = generate_cloud_field(seed, 128, 128, coverage, 12.0).unwrap();
            let scene = render_cloud_scene(&field, GroundSpectrum::default());
            let mask = cloud_mask(&stretch(&scene, 1.0, 99.0).unwrap(), 0.6, 0.2).unwrap();
            // Counting oracle against generator truth.
            let truth = field.raster.values().iter().filter(|&&o| o > 0.5).count() as f64 / (128.0 * 128.0);
            assert!(
                (mask.cloud_fraction - truth).abs() <= 0.02,
                "{seed}: {} vs {truth}",
                mask.cloud_fraction
            );
            let recount = mask.cloudy.iter().filter(|&&c| c).count() as f64 / mask.cloudy.len() as f64;
            assert_eq!(mask.cloud_fraction, recount);
        }
    }

    #[test]
    fn column_fraction() {
        let m = CloudMask::from_grid(4, 2, vec![true, false, false, false, true, true, false, false]);
        assert_eq!(m.fraction_in_columns(0, 1), 1.0);
        assert_eq!(m.fraction_in_columns(1, 2), 0.5);
        assert_eq!(m.fraction_in_columns(2, 4), 0.0);
        assert_eq!(m.cloud_fraction, 3.0 / 8.0);
    }
}
