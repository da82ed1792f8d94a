use super::AnalysisError;
use crate::scene::SceneRaster;

/// Linear-interpolated percentile of an ascending slice, `p` in [0, 100].
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Per-band dynamic range stretch: the `[p_low, p_high]` percentile range
/// maps affinely onto [0, 1], values outside are clipped. A band whose two
/// percentiles coincide maps to all zeros.
pub fn stretch(image: &SceneRaster, p_low: f64, p_high: f64) -> Result<SceneRaster, AnalysisError> {
    if !(p_low.is_finite() && p_high.is_finite() && 0.0 <= p_low && p_low < p_high && p_high <= 100.0) {
        return Err(AnalysisError::InvalidPercentiles {
            low: p_low,
            high: p_high,
        });
    }
    let mut values = Vec::with_capacity(image.values().len());
    for b in 0..image.bands() {
        let band = image.band(b);
        let mut sorted: Vec<f64> = band.iter().map(|&v| v as f64).collect();
        sorted.sort_by(f64::total_cmp);
        let lo = percentile(&sorted, p_low);
        let hi = percentile(&sorted, p_high);
        let span = hi - lo;
        if span > 0.0 {
            values.extend(band.iter().map(|&v| ((v as f64 - lo) / span).clamp(0.0, 1.0) as f32));
        } else {
            values.extend(std::iter::repeat_n(0.0f32, band.len()));
        }
    }
    let out = SceneRaster::new(image.width(), image.height(), image.bands(), values)
        .expect("stretched samples are in [0, 1]");
    Ok(out
        .with_geo(image.gsd_km(), image.origin_km())
        .expect("gsd carried over from a valid raster"))
}
