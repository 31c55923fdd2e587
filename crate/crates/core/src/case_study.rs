//! Reference values from the four-dataset field case study (Husky on tile
//! and snow, Warthog on gravel and ice).
//!
//! Only the vehicle parameters, two absolute medians and two stated ratios
//! were published; the raw logs were not. The derived medians below are
//! therefore consistency fixtures, not reproductions.

use crate::mapping::VehicleProfile;

pub const HUSKY_MASS: f64 = 75.0;
pub const HUSKY_V_MAX: f64 = 1.0;
pub const WARTHOG_MASS: f64 = 470.0;
pub const WARTHOG_V_MAX: f64 = 5.0;

/// Median distortion modulus, Husky on tile.
pub const HUSKY_TILE_MEDIAN: f64 = 1.716;
/// Median distortion modulus, Husky on snow.
pub const HUSKY_SNOW_MEDIAN: f64 = 2.76;
/// Reported snow-over-tile factor for the Husky.
pub const SNOW_OVER_TILE: f64 = 1.6;
/// Warthog-on-ice median over Husky-on-snow median.
pub const WARTHOG_ICE_OVER_HUSKY_SNOW: f64 = 3.6;
/// Warthog ice median over Warthog gravel median ("5% lower").
pub const WARTHOG_ICE_OVER_GRAVEL: f64 = 0.95;
/// Reported mass and top-speed factors between the two vehicles.
pub const REPORTED_MASS_FACTOR: f64 = 6.2;
pub const REPORTED_SPEED_FACTOR: f64 = 5.0;

pub fn husky() -> VehicleProfile<f64> {
    VehicleProfile::new("Husky A200", HUSKY_MASS, HUSKY_V_MAX).expect("valid")
}

pub fn warthog() -> VehicleProfile<f64> {
    VehicleProfile::new("Warthog", WARTHOG_MASS, WARTHOG_V_MAX).expect("valid")
}

/// Warthog-on-ice median implied by the stated factor.
pub fn warthog_ice_median() -> f64 {
    HUSKY_SNOW_MEDIAN * WARTHOG_ICE_OVER_HUSKY_SNOW
}

/// Warthog-on-gravel median implied by the stated factors.
pub fn warthog_gravel_median() -> f64 {
    warthog_ice_median() / WARTHOG_ICE_OVER_GRAVEL
}

/// `(label, vehicle, terrain, median)` for the four datasets.
pub fn datasets() -> [(&'static str, VehicleProfile<f64>, &'static str, f64); 4] {
    [
        ("Husky tile", husky(), "tile", HUSKY_TILE_MEDIAN),
        ("Husky snow", husky(), "snow", HUSKY_SNOW_MEDIAN),
        ("Warthog gravel", warthog(), "gravel", warthog_gravel_median()),
        ("Warthog ice", warthog(), "ice", warthog_ice_median()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::kinetic_energy;

    #[test]
    fn implied_medians() {
        assert!((warthog_ice_median() - 9.936).abs() < 1e-12);
        assert!((warthog_gravel_median() / warthog_ice_median() - 1.0 / 0.95).abs() < 1e-12);
        assert_eq!(kinetic_energy(&husky()), 37.5);
        assert_eq!(kinetic_energy(&warthog()), 5875.0);
    }
}
