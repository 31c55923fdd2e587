//! Deployment catalog and the kinetic-energy vs terrain-complexity map.

mod catalog;
mod render;
mod risk;
mod terrain;

pub use catalog::{build_catalog, Catalog, DeploymentRecord, VehicleProfile, KE_TOLERANCE};
pub use render::{render_map, render_svg, write_map_csv, read_map_csv, MapLayout, MapPoint, MapRow};
pub use risk::{RiskLevel, RiskThreshold, RiskZoning};
pub use terrain::{default_terrain_scale, TerrainClass, TerrainScale};
