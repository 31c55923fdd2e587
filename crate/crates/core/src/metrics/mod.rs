//! Per-step distortion series, robust summaries, and dataset comparison.

mod mann_whitney;
mod series;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::VehicleSpec;
use crate::scalar::Real;

pub use mann_whitney::{
    compare, exact_u_counts, mann_whitney, median_ratio, CompareOptions, ComparisonResult, MannWhitney, MedianRatio,
    TestMethod, EXACT_LIMIT,
};
pub use series::{distortion_series, DistortionSeries};

/// Robust summary of a set of distortion moduli.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats<T> {
    pub n: usize,
    pub median: T,
    pub q25: T,
    pub q75: T,
    pub mean: T,
    pub max: T,
}

/// Linear-interpolation quantile (Hyndman & Fan type 7) of sorted data.
pub fn quantile_sorted<T: Real>(sorted: &[T], p: T) -> T {
    let n = sorted.len();
    debug_assert!(n > 0);
    let h = T::from_usize_lossy(n - 1) * p;
    let lo = h.floor().to_usize().unwrap_or(0).min(n - 1);
    let hi = (lo + 1).min(n - 1);
    let frac = h - T::from_usize_lossy(lo);
    if frac == T::zero() || lo == hi {
        sorted[lo]
    } else {
        (sorted[lo] + (sorted[hi] - sorted[lo]) * frac).min(sorted[hi])
    }
}

pub fn median<T: Real>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::InsufficientData("median of an empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    Ok(quantile_sorted(&v, T::lit(0.5)))
}

pub fn summarize_values<T: Real>(values: &[T]) -> Result<SummaryStats<T>> {
    if values.is_empty() {
        return Err(Error::InsufficientData("cannot summarize an empty series".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = v.len();
    // running mean: exact for constant data and never outside [min, max]
    let mean = v
        .iter()
        .enumerate()
        .fold(T::zero(), |m, (k, &x)| m + (x - m) / T::from_usize_lossy(k + 1));
    Ok(SummaryStats {
        n,
        median: quantile_sorted(&v, T::lit(0.5)),
        q25: quantile_sorted(&v, T::lit(0.25)),
        q75: quantile_sorted(&v, T::lit(0.75)),
        mean,
        max: v[n - 1],
    })
}

pub fn summarize<T: Real>(series: &DistortionSeries<T>) -> Result<SummaryStats<T>> {
    summarize_values(series.modulus())
}

/// Anything with a mass and a top speed.
pub trait Inertial<T> {
    fn mass(&self) -> T;
    fn v_max(&self) -> T;
}

impl<T: Real> Inertial<T> for VehicleSpec<T> {
    fn mass(&self) -> T {
        VehicleSpec::mass(self)
    }

    fn v_max(&self) -> T {
        VehicleSpec::v_max(self)
    }
}

/// Maximum kinetic energy `½·m·v_max²` [J], the proxy for internal
/// motion distortion.
pub fn kinetic_energy<T: Real, V: Inertial<T>>(vehicle: &V) -> T {
    let v = vehicle.v_max();
    T::lit(0.5) * vehicle.mass() * v * v
}
