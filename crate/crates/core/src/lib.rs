//! Motion distortion metric for ground-vehicle datasets.
//!
//! The ideal slip-less kinematic model predicts a body twist from the wheel
//! commands; the localization system observes another. Their difference is
//! the slip vector, and its modulus at each time step measures how hard the
//! vehicle/terrain/trajectory combination was to model. Datasets are
//! summarized by the median modulus and compared with a rank-sum test.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below fix the scalar.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod case_study;
mod error;
pub mod ingest;
pub mod io;
pub mod kinematics;
pub mod mapping;
pub mod metrics;
mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::{wrap_angle, Real};

pub use kinematics::{
    ideal_bicycle, ideal_diff_drive, slip, slip_modulus, AckermannCommand, AngularWeight, BodyVelocity, VehicleSpec,
    WheelCommand,
};
pub use metrics::{compare, distortion_series, kinetic_energy, summarize, ComparisonResult, DistortionSeries, SummaryStats};

pub type BodyVelocity64 = BodyVelocity<f64>;
pub type BodyVelocity32 = BodyVelocity<f32>;
pub type WheelCommand64 = WheelCommand<f64>;
pub type WheelCommand32 = WheelCommand<f32>;
pub type AckermannCommand64 = AckermannCommand<f64>;
pub type AckermannCommand32 = AckermannCommand<f32>;
pub type VehicleSpec64 = VehicleSpec<f64>;
pub type VehicleSpec32 = VehicleSpec<f32>;
pub type PoseSample64 = ingest::PoseSample<f64>;
pub type PoseSample32 = ingest::PoseSample<f32>;
pub type AlignedDataset64 = ingest::AlignedDataset<f64>;
pub type AlignedDataset32 = ingest::AlignedDataset<f32>;
pub type DistortionSeries64 = DistortionSeries<f64>;
pub type DistortionSeries32 = DistortionSeries<f32>;
pub type SummaryStats64 = SummaryStats<f64>;
pub type SummaryStats32 = SummaryStats<f32>;
pub type ComparisonResult64 = ComparisonResult<f64>;
pub type ComparisonResult32 = ComparisonResult<f32>;
pub type SlipModel64 = sim::SlipModel<f64>;
pub type SlipModel32 = sim::SlipModel<f32>;
pub type Catalog64 = mapping::Catalog<f64>;
pub type DeploymentRecord64 = mapping::DeploymentRecord<f64>;
