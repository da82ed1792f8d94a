//! Turns a lookahead analysis product into an across-track tile choice.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::AnalysisProduct;
use crate::geometry::{across_track_angle_deg, GroundFootprint, OrbitConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TargetingError {
    #[error("tile count must be odd and >= 1, got {0}")]
    InvalidTileCount(usize),
    #[error("lookahead image is {width} px wide, fewer than {tiles} tiles")]
    ImageTooNarrow { width: usize, tiles: usize },
    #[error("policy {policy:?} cannot use this analysis product")]
    ProductMismatch { policy: Policy },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    CloudAvoid,
    CloudSeek,
    ThermalHunt,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::CloudAvoid => "cloud_avoid",
            Policy::CloudSeek => "cloud_seek",
            Policy::ThermalHunt => "thermal_hunt",
        }
    }

    pub fn uses_clouds(self) -> bool {
        matches!(self, Policy::CloudAvoid | Policy::CloudSeek)
    }
}

impl std::str::FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cloud_avoid" => Ok(Policy::CloudAvoid),
            "cloud_seek" => Ok(Policy::CloudSeek),
            "thermal_hunt" => Ok(Policy::ThermalHunt),
            other => Err(format!(
                "unknown policy {other:?} (cloud_avoid | cloud_seek | thermal_hunt)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TileScore {
    pub tile_index: usize,
    pub across_track_offset_deg: f64,
    pub score: f64,
    pub cloud_fraction: Option<f64>,
    pub reachable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointingCommand {
    pub tile_index: Option<usize>,
    pub across_track_deg: f64,
    pub along_track_slew_deg: f64,
    /// True when the command is the default nadir pointing rather than a
    /// selected tile.
    pub fallback: bool,
}

impl PointingCommand {
    pub fn nadir_fallback(along_track_slew_deg: f64) -> Self {
        Self {
            tile_index: None,
            across_track_deg: 0.0,
            along_track_slew_deg,
            fallback: true,
        }
    }
}

/// Column range `[start, end)` of each of `n_tiles` equal strips.
pub fn tile_columns(width: usize, n_tiles: usize) -> Vec<(usize, usize)> {
    (0..n_tiles)
        .map(|t| (t * width / n_tiles, (t + 1) * width / n_tiles))
        .collect()
}

/// Scores `n_tiles` across-track strips of the lookahead image.
///
/// Tile centers are placed on the ground across the lookahead footprint and
/// converted to pointing angles with flat-Earth geometry. A tile is
/// reachable when its offset is within `max_across_track_deg` and
/// `reachable(offset_deg)` accepts it (the executor's deadline check).
pub fn tile_scores(
    product: &AnalysisProduct,
    policy: Policy,
    n_tiles: usize,
    max_across_track_deg: f64,
    orbit: &OrbitConfig,
    footprint: &GroundFootprint,
    reachable: impl Fn(f64) -> bool,
) -> Result<Vec<TileScore>, TargetingError> {
    if n_tiles == 0 || n_tiles.is_multiple_of(2) {
        return Err(TargetingError::InvalidTileCount(n_tiles));
    }
    let width = product.width();
    if width < n_tiles {
        return Err(TargetingError::ImageTooNarrow { width, tiles: n_tiles });
    }
    let columns = tile_columns(width, n_tiles);
    let tile_width_km = footprint.across_track_extent_km / n_tiles as f64;

    let mut scores = Vec::with_capacity(n_tiles);
    for (t, &(c0, c1)) in columns.iter().enumerate() {
        let steps = t as f64 - (n_tiles / 2) as f64;
        let offset_deg = across_track_angle_deg(orbit, footprint.across_track_center_km + steps * tile_width_km);
        let (score, cloud_fraction) = match (policy, product) {
            (Policy::CloudAvoid, AnalysisProduct::Cloud(mask)) => {
                let f = mask.fraction_in_columns(c0, c1);
                (1.0 - f, Some(f))
            }
            (Policy::CloudSeek, AnalysisProduct::Cloud(mask)) => {
                let f = mask.fraction_in_columns(c0, c1);
                (f, Some(f))
            }
            (Policy::ThermalHunt, AnalysisProduct::Thermal { detections, .. }) => {
                let best = detections
                    .iter()
                    .filter(|d| (c0..c1).contains(&d.col))
                    .map(|d| d.score)
                    .fold(0.0, f64::max);
                (best, None)
            }
            _ => return Err(TargetingError::ProductMismatch { policy }),
        };
        scores.push(TileScore {
            tile_index: t,
            across_track_offset_deg: offset_deg,
            score,
            cloud_fraction,
            reachable: offset_deg.abs() <= max_across_track_deg && reachable(offset_deg),
        });
    }
    Ok(scores)
}

/// Highest-scoring reachable tile; ties go to the smallest pointing offset,
/// then the lowest tile index. Falls back to nadir when nothing is
/// reachable, or when a thermal hunt found nothing.
pub fn select_target(scores: &[TileScore], policy: Policy, along_track_slew_deg: f64) -> PointingCommand {
    let best = scores
        .iter()
        .filter(|s| s.reachable)
        .fold(None::<&TileScore>, |best, s| match best {
            None => Some(s),
            Some(b) => {
                let better = s.score > b.score
                    || (s.score == b.score
                        && (s.across_track_offset_deg.abs() < b.across_track_offset_deg.abs()
                            || (s.across_track_offset_deg.abs() == b.across_track_offset_deg.abs()
                                && s.tile_index < b.tile_index)));
                Some(if better { s } else { b })
            }
        });
    match best {
        Some(b) if !(policy == Policy::ThermalHunt && b.score <= 0.0) => PointingCommand {
            tile_index: Some(b.tile_index),
            across_track_deg: b.across_track_offset_deg,
            along_track_slew_deg,
            fallback: false,
        },
        _ => PointingCommand::nadir_fallback(along_track_slew_deg),
    }
}
