//! Lookahead geometry on a spherical, non-rotating Earth.
//!
//! Angles at the spacecraft are measured off nadir. The ground speed is an
//! input constant (sub-satellite point speed), not derived from orbital
//! mechanics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_EARTH_RADIUS_KM: f64 = 6371.0;

/// Look angles closer than this to the geometric horizon are rejected.
pub const HORIZON_MARGIN_DEG: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid orbit: {0}")]
    InvalidOrbit(&'static str),
    #[error("look angle {0} deg outside [0, 90)")]
    LookAngleOutOfRange(f64),
    #[error("look angle {angle_deg} deg is beyond the usable horizon ({limit_deg:.3} deg)")]
    BeyondHorizon { angle_deg: f64, limit_deg: f64 },
    #[error("pointing {pointing_deg} deg with fov {fov_deg} deg leaves the [-90, 90] deg range")]
    PointingOutOfRange { pointing_deg: f64, fov_deg: f64 },
    #[error("sensor fov must be positive and finite, got {0}")]
    InvalidFov(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitConfig {
    pub altitude_km: f64,
    pub ground_speed_km_s: f64,
    pub earth_radius_km: f64,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self {
            altitude_km: 500.0,
            ground_speed_km_s: 7.5,
            earth_radius_km: DEFAULT_EARTH_RADIUS_KM,
        }
    }
}

impl OrbitConfig {
    pub fn new(altitude_km: f64, ground_speed_km_s: f64) -> Result<Self, GeometryError> {
        let orbit = Self {
            altitude_km,
            ground_speed_km_s,
            earth_radius_km: DEFAULT_EARTH_RADIUS_KM,
        };
        orbit.validate()?;
        Ok(orbit)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.altitude_km.is_finite() && self.altitude_km > 0.0) {
            return Err(GeometryError::InvalidOrbit("altitude_km must be > 0"));
        }
        if !(self.ground_speed_km_s.is_finite() && self.ground_speed_km_s > 0.0) {
            return Err(GeometryError::InvalidOrbit("ground_speed_km_s must be > 0"));
        }
        if !(self.earth_radius_km.is_finite() && self.earth_radius_km > 0.0) {
            return Err(GeometryError::InvalidOrbit("earth_radius_km must be > 0"));
        }
        Ok(())
    }

    /// Angular radius of the Earth seen from the spacecraft, in radians.
    pub fn earth_angular_radius_rad(&self) -> f64 {
        (self.earth_radius_km / (self.earth_radius_km + self.altitude_km)).asin()
    }

    /// Largest accepted look angle (horizon minus [`HORIZON_MARGIN_DEG`]).
    pub fn max_look_angle_deg(&self) -> f64 {
        self.earth_angular_radius_rad().to_degrees() - HORIZON_MARGIN_DEG
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LookaheadGeometry {
    pub look_angle_deg: f64,
    pub central_angle_rad: f64,
    pub ground_distance_km: f64,
    pub lead_time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundFootprint {
    pub along_track_center_km: f64,
    pub across_track_center_km: f64,
    pub along_track_extent_km: f64,
    pub across_track_extent_km: f64,
}

impl GroundFootprint {
    pub fn along_bounds(&self) -> (f64, f64) {
        let half = 0.5 * self.along_track_extent_km;
        (self.along_track_center_km - half, self.along_track_center_km + half)
    }

    pub fn across_bounds(&self) -> (f64, f64) {
        let half = 0.5 * self.across_track_extent_km;
        (self.across_track_center_km - half, self.across_track_center_km + half)
    }
}

fn check_look_angle(look_angle_deg: f64) -> Result<(), GeometryError> {
    if !(look_angle_deg.is_finite() && (0.0..90.0).contains(&look_angle_deg)) {
        return Err(GeometryError::LookAngleOutOfRange(look_angle_deg));
    }
    Ok(())
}

/// Solves the spacecraft / Earth-center / target triangle for a lookahead
/// pointed `look_angle_deg` off nadir along the velocity vector.
///
/// With `sin(rho) = Re / (Re + h)`, the elevation at the target is
/// `eps = acos(sin(eta) / sin(rho))` and the Earth central angle is
/// `lambda = 90deg - eta - eps`.
pub fn lead_time(orbit: &OrbitConfig, look_angle_deg: f64) -> Result<LookaheadGeometry, GeometryError> {
    orbit.validate()?;
    check_look_angle(look_angle_deg)?;
    let limit_deg = orbit.max_look_angle_deg();
    if look_angle_deg > limit_deg {
        return Err(GeometryError::BeyondHorizon {
            angle_deg: look_angle_deg,
            limit_deg,
        });
    }
    let eta = look_angle_deg.to_radians();
    let sin_rho = orbit.earth_radius_km / (orbit.earth_radius_km + orbit.altitude_km);
    let elevation = (eta.sin() / sin_rho).clamp(-1.0, 1.0).acos();
    let central_angle_rad = (std::f64::consts::FRAC_PI_2 - eta - elevation).max(0.0);
    let ground_distance_km = orbit.earth_radius_km * central_angle_rad;
    Ok(LookaheadGeometry {
        look_angle_deg,
        central_angle_rad,
        ground_distance_km,
        lead_time_s: ground_distance_km / orbit.ground_speed_km_s,
    })
}

/// Flat-Earth cross-check: `h * tan(eta) / v`.
pub fn flat_earth_lead_time(orbit: &OrbitConfig, look_angle_deg: f64) -> Result<f64, GeometryError> {
    orbit.validate()?;
    check_look_angle(look_angle_deg)?;
    Ok(orbit.altitude_km * look_angle_deg.to_radians().tan() / orbit.ground_speed_km_s)
}

/// Flat-Earth projection of a square sensor field of view.
///
/// Across track the footprint spans the ground points of the two FOV edge
/// rays, `h * tan(pointing -/+ half_fov)`; along track it is the FOV width
/// stretched by the slant range.
pub fn footprint_at(
    orbit: &OrbitConfig,
    along_track_pos_km: f64,
    pointing_across_track_deg: f64,
    sensor_fov_deg: f64,
) -> Result<GroundFootprint, GeometryError> {
    orbit.validate()?;
    if !(sensor_fov_deg.is_finite() && sensor_fov_deg > 0.0) {
        return Err(GeometryError::InvalidFov(sensor_fov_deg));
    }
    let half_fov = 0.5 * sensor_fov_deg;
    if !pointing_across_track_deg.is_finite() || pointing_across_track_deg.abs() + half_fov >= 90.0 {
        return Err(GeometryError::PointingOutOfRange {
            pointing_deg: pointing_across_track_deg,
            fov_deg: sensor_fov_deg,
        });
    }
    let h = orbit.altitude_km;
    let p = pointing_across_track_deg.to_radians();
    let f = half_fov.to_radians();
    let (near, far) = (h * (p - f).tan(), h * (p + f).tan());
    let along_track_extent_km = 2.0 * h * f.tan() / p.cos();
    Ok(GroundFootprint {
        along_track_center_km: along_track_pos_km,
        across_track_center_km: 0.5 * (near + far),
        along_track_extent_km,
        across_track_extent_km: far - near,
    })
}

/// Across-track pointing angle (deg) whose boresight lands `offset_km` off
/// the ground track, flat-Earth.
pub fn across_track_angle_deg(orbit: &OrbitConfig, offset_km: f64) -> f64 {
    (offset_km / orbit.altitude_km).atan().to_degrees()
}
