use nalgebra::{DMatrix, DVector};

use super::{score_map, AnalysisError, PixelScorer, ScoreMap, DEFAULT_COVARIANCE_EPSILON};
use crate::scene::SceneRaster;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Angle between two band vectors, in `[0, pi]`.
pub fn spectral_angle(x: &[f64], r: &[f64]) -> Result<f64, AnalysisError> {
    if x.len() != r.len() {
        return Err(AnalysisError::LengthMismatch {
            expected: r.len(),
            found: x.len(),
        });
    }
    let nx = dot(x, x).sqrt();
    let nr = dot(r, r).sqrt();
    if nx == 0.0 || nr == 0.0 {
        return Err(AnalysisError::ZeroVector);
    }
    Ok((dot(x, r) / (nx * nr)).clamp(-1.0, 1.0).acos())
}

/// Spectral angle to a fixed reference; zero pixels score pi/2.
#[derive(Debug, Clone)]
pub struct SpectralAngleScorer {
    reference: Vec<f64>,
}

impl SpectralAngleScorer {
    pub fn new(reference: Vec<f64>) -> Result<Self, AnalysisError> {
        if reference.iter().all(|&v| v == 0.0) {
            return Err(AnalysisError::ZeroVector);
        }
        Ok(Self { reference })
    }
}

impl PixelScorer for SpectralAngleScorer {
    fn score(&self, pixel: &[f64]) -> f64 {
        spectral_angle(pixel, &self.reference).unwrap_or(std::f64::consts::FRAC_PI_2)
    }
}

/// Background mean, covariance (row-major, bands x bands) and the ridge
/// added to the covariance diagonal before inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundStats {
    pub mean: Vec<f64>,
    pub covariance: Vec<f64>,
    pub regularization: f64,
}

impl BackgroundStats {
    /// Sample mean and unbiased sample covariance over every pixel, with the
    /// default ridge of 1e-6.
    pub fn estimate(image: &SceneRaster) -> Self {
        let bands = image.bands();
        let n = image.pixels();
        let mean: Vec<f64> = (0..bands)
            .map(|b| image.band(b).iter().map(|&v| v as f64).sum::<f64>() / n as f64)
            .collect();
        let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
        let mut covariance = vec![0.0; bands * bands];
        for i in 0..bands {
            for j in i..bands {
                let (bi, bj) = (image.band(i), image.band(j));
                let s: f64 = bi
                    .iter()
                    .zip(bj)
                    .map(|(&a, &b)| (a as f64 - mean[i]) * (b as f64 - mean[j]))
                    .sum();
                covariance[i * bands + j] = s / denom;
                covariance[j * bands + i] = s / denom;
            }
        }
        Self {
            mean,
            covariance,
            regularization: DEFAULT_COVARIANCE_EPSILON,
        }
    }

    pub fn bands(&self) -> usize {
        self.mean.len()
    }
}

/// `MF(x) = (x - mu)' S^-1 (r - mu) / ((r - mu)' S^-1 (r - mu))` with
/// `S = Sigma + eps I`. The whitened target direction is solved once by
/// Cholesky factorization.
#[derive(Debug, Clone)]
pub struct MatchedFilter {
    mean: Vec<f64>,
    weights: Vec<f64>,
    norm: f64,
}

impl MatchedFilter {
    pub fn new(target: &[f64], stats: &BackgroundStats) -> Result<Self, AnalysisError> {
        let bands = stats.bands();
        if target.len() != bands {
            return Err(AnalysisError::LengthMismatch {
                expected: bands,
                found: target.len(),
            });
        }
        if stats.covariance.len() != bands * bands {
            return Err(AnalysisError::LengthMismatch {
                expected: bands * bands,
                found: stats.covariance.len(),
            });
        }
        let d: Vec<f64> = target.iter().zip(&stats.mean).map(|(r, m)| r - m).collect();
        if d.iter().all(|&v| v == 0.0) {
            return Err(AnalysisError::DegenerateTarget);
        }
        let s = DMatrix::from_row_slice(bands, bands, &stats.covariance)
            + DMatrix::identity(bands, bands) * stats.regularization;
        let chol = s.cholesky().ok_or(AnalysisError::NotPositiveDefinite)?;
        let weights = chol.solve(&DVector::from_column_slice(&d));
        let weights: Vec<f64> = weights.iter().copied().collect();
        let norm = dot(&d, &weights);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(AnalysisError::DegenerateTarget);
        }
        Ok(Self {
            mean: stats.mean.clone(),
            weights,
            norm,
        })
    }

    pub fn score_pixel(&self, x: &[f64]) -> f64 {
        let num: f64 = x
            .iter()
            .zip(&self.mean)
            .zip(&self.weights)
            .map(|((x, m), w)| (x - m) * w)
            .sum();
        num / self.norm
    }
}

impl PixelScorer for MatchedFilter {
    fn score(&self, pixel: &[f64]) -> f64 {
        self.score_pixel(pixel)
    }
}

/// Matched-filter score map; statistics are estimated from the image when
/// not supplied.
pub fn matched_filter(
    image: &SceneRaster,
    target: &[f64],
    stats: Option<&BackgroundStats>,
) -> Result<ScoreMap, AnalysisError> {
    let estimated;
    let stats = match stats {
        Some(s) => s,
        None => {
            estimated = BackgroundStats::estimate(image);
            &estimated
        }
    };
    if stats.bands() != image.bands() {
        return Err(AnalysisError::BandCount {
            expected: stats.bands(),
            found: image.bands(),
        });
    }
    let filter = MatchedFilter::new(target, stats)?;
    Ok(score_map(image, &filter))
}
