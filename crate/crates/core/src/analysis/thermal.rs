use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{expect_bands, AnalysisError};
use crate::scene::{SceneRaster, BAND_NIR, BAND_RED};

const RED_FLOOR: f64 = 1e-6;

/// One merged hot region, reported at its highest-scoring pixel. The score
/// is the NIR / red ratio there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalDetection {
    pub row: usize,
    pub col: usize,
    pub score: f64,
}

/// Flags pixels with `NIR > t_hot` and `NIR / max(red, 1e-6) > t_ratio`,
/// merges 4-connected flags into regions and reports one detection per
/// region, in row-major order of each region's first pixel.
pub fn thermal_anomalies(
    image: &SceneRaster,
    t_hot: f64,
    t_ratio: f64,
) -> Result<Vec<ThermalDetection>, AnalysisError> {
    expect_bands(image, 4)?;
    let (w, h) = (image.width(), image.height());
    let nir = image.band(BAND_NIR);
    let red = image.band(BAND_RED);
    let score: Vec<Option<f64>> = (0..w * h)
        .map(|i| {
            let n = nir[i] as f64;
            let ratio = n / (red[i] as f64).max(RED_FLOOR);
            (n > t_hot && ratio > t_ratio).then_some(ratio)
        })
        .collect();

    let mut seen = vec![false; w * h];
    let mut detections = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if seen[start] || score[start].is_none() {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut best = (start, score[start].unwrap_or_default());
        while let Some(i) = queue.pop_front() {
            let s = score[i].unwrap_or_default();
            if s > best.1 || (s == best.1 && i < best.0) {
                best = (i, s);
            }
            let (r, c) = (i / w, i % w);
            let neighbors = [
                (r > 0).then(|| i - w),
                (r + 1 < h).then(|| i + w),
                (c > 0).then(|| i - 1),
                (c + 1 < w).then(|| i + 1),
            ];
            for j in neighbors.into_iter().flatten() {
                if !seen[j] && score[j].is_some() {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        detections.push(ThermalDetection {
            row: best.0 / w,
            col: best.0 % w,
            score: best.1,
        });
    }
    Ok(detections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{generate_thermal_scene, ThermalSceneParams};

    #[test]
    fn uniform_background_is_quiet() {
        let img = SceneRaster::filled(16, 16, 4, 0.2).unwrap();
        assert!(thermal_anomalies(&img, 0.8, 2.0).unwrap().is_empty());
    }

    #[test]
    fn all_ones_merges_to_one() {
        let img = SceneRaster::filled(9, 7, 4, 1.0).unwrap();
        let d = thermal_anomalies(&img, 0.5, 0.5).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].row, d[0].col), (0, 0));
    }

    #[test]
    fn diagonal_pixels_are_separate() {
        let mut v = vec![0.1f32; 4 * 9];
        v[27] = 0.9; // NIR (0,0)
        v[27 + 4] = 0.95; // NIR (1,1)
        let img = SceneRaster::new(3, 3, 4, v).unwrap();
        let d = thermal_anomalies(&img, 0.8, 2.0).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d[1].score - 0.95f32 as f64 / 0.1f32 as f64).abs() < 1e-12);
    }

    #[test]
    fn finds_generated_hotspots() {
        let p = ThermalSceneParams {
            width: 96,
            height: 96,
            n_hotspots: 3,
            hotspot_sigma_px: 2.0,
            background_level: 0.2,
            min_separation_px: 20.0,
        };
        for seed in 0..5 {
            let scene = generate_thermal_scene(seed, &p).unwrap();
            let d = thermal_anomalies(&scene.raster, 0.8, 2.0).unwrap();
            assert_eq!(d.len(), 3, "seed {seed}");
            for h in &scene.hotspots {
                let near = d.iter().any(|det| {
                    let dr = det.row as f64 - h.row as f64;
                    let dc = det.col as f64 - h.col as f64;
                    (dr * dr + dc * dc).sqrt() <= p.hotspot_sigma_px
                });
                assert!(near, "seed {seed}: hotspot {h:?} missed by {d:?}");
            }
        }
    }

    #[test]
    fn wrong_band_count() {
        let img = SceneRaster::filled(2, 2, 1, 0.5).unwrap();
        assert!(thermal_anomalies(&img, 0.8, 2.0).is_err());
    }
}
