//! Dataset directories: a `dataset.toml` sidecar next to the CSV logs.
//!
//! Sidecar keys:
//!
//! ```toml
//! name = "husky_tile"        # dataset identifier
//! vehicle = "husky"          # vehicle identifier
//! wheel_radius = 0.165       # [m]
//! track_width = 0.555        # [m]
//! mass = 75.0                # [kg]
//! v_max = 1.0                # [m/s]
//! terrain = "tile"           # looked up in the terrain scale
//! wheelbase = 0.5            # [m], optional
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{VehicleSpec, WheelCommand};
use crate::mapping::TerrainScale;
use crate::scalar::Real;

use super::{
    body_velocity_from_poses, parse_log, DatasetMeta, FiniteDifference, LogFormat, PoseSample, RawStream,
    TimedVelocity,
};

pub const SIDECAR_FILE: &str = "dataset.toml";
pub const COMMANDS_FILE: &str = "commands.csv";
pub const POSES_FILE: &str = "poses.csv";
pub const VELOCITIES_FILE: &str = "velocities.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar<T> {
    pub name: String,
    pub vehicle: String,
    pub wheel_radius: T,
    pub track_width: T,
    pub mass: T,
    pub v_max: T,
    pub terrain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wheelbase: Option<T>,
}

impl<T: Real> Sidecar<T> {
    pub fn from_spec(name: impl Into<String>, spec: &VehicleSpec<T>, terrain: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            vehicle: spec.name().to_string(),
            wheel_radius: spec.wheel_radius(),
            track_width: spec.track_width(),
            mass: spec.mass(),
            v_max: spec.v_max(),
            terrain: terrain.into(),
            wheelbase: spec.wheelbase(),
        }
    }

    pub fn vehicle_spec(&self) -> Result<VehicleSpec<T>> {
        let spec = VehicleSpec::new(
            self.vehicle.clone(),
            self.wheel_radius,
            self.track_width,
            self.mass,
            self.v_max,
        )?;
        match self.wheelbase {
            Some(l) => spec.with_wheelbase(l),
            None => Ok(spec),
        }
    }

    pub fn meta(&self, scale: &TerrainScale) -> Result<DatasetMeta<T>> {
        Ok(DatasetMeta {
            name: self.name.clone(),
            vehicle: self.vehicle_spec()?,
            terrain: scale.lookup(&self.terrain)?.clone(),
        })
    }
}

/// Which observed-velocity log a dataset directory is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VelocitySource {
    /// `velocities.csv` when present, otherwise `poses.csv`.
    #[default]
    Auto,
    Velocities,
    Poses(FiniteDifference),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFiles {
    pub sidecar: PathBuf,
    pub commands: PathBuf,
    pub poses: PathBuf,
    pub velocities: PathBuf,
}

impl DatasetFiles {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            sidecar: dir.join(SIDECAR_FILE),
            commands: dir.join(COMMANDS_FILE),
            poses: dir.join(POSES_FILE),
            velocities: dir.join(VELOCITIES_FILE),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset<T> {
    pub meta: DatasetMeta<T>,
    pub commands: Vec<WheelCommand<T>>,
    pub velocities: Vec<TimedVelocity<T>>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn read_sidecar<T: Real>(path: &Path) -> Result<Sidecar<T>> {
    let text = read_text(path)?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        path: Some(path.to_path_buf()),
        line: e
            .span()
            .map_or(0, |s| text[..s.start].matches('\n').count() as u64 + 1),
        message: e.message().to_string(),
    })
}

/// Reads the sidecar and raw logs of a dataset directory. Poses are
/// differentiated into body velocities here; alignment is left to the caller.
pub fn load_dataset_dir<T: Real>(
    dir: &Path,
    scale: &TerrainScale,
    source: VelocitySource,
) -> Result<LoadedDataset<T>> {
    let files = DatasetFiles::in_dir(dir);
    let sidecar: Sidecar<T> = read_sidecar(&files.sidecar)?;
    let meta = sidecar.meta(scale)?;
    let commands = match parse_log(&files.commands, LogFormat::CommandCsv)? {
        RawStream::Commands(c) => c,
        _ => unreachable!(),
    };
    let source = match source {
        VelocitySource::Auto if files.velocities.exists() => VelocitySource::Velocities,
        VelocitySource::Auto => VelocitySource::Poses(FiniteDifference::default()),
        s => s,
    };
    let velocities = match source {
        VelocitySource::Velocities => match parse_log(&files.velocities, LogFormat::VelocityCsv)? {
            RawStream::Velocities(v) => v,
            _ => unreachable!(),
        },
        VelocitySource::Poses(scheme) => {
            if !files.poses.exists() {
                return Err(Error::io(
                    &files.poses,
                    std::io::Error::new(
                        std::io::ErrorKind::NotFound,
                        format!("neither {VELOCITIES_FILE} nor {POSES_FILE} found"),
                    ),
                ));
            }
            let poses: Vec<PoseSample<T>> = match parse_log(&files.poses, LogFormat::PoseCsv)? {
                RawStream::Poses(p) => p,
                _ => unreachable!(),
            };
            body_velocity_from_poses(&poses, scheme).map_err(|e| e.with_path(&files.poses))?
        }
        VelocitySource::Auto => unreachable!(),
    };
    Ok(LoadedDataset {
        meta,
        commands,
        velocities,
    })
}

/// Writes a dataset directory in the layout `load_dataset_dir` reads.
pub fn write_dataset_dir<T: Real>(
    dir: &Path,
    sidecar: &Sidecar<T>,
    commands: &[WheelCommand<T>],
    poses: Option<&[PoseSample<T>]>,
    velocities: Option<&[TimedVelocity<T>]>,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = DatasetFiles::in_dir(dir);
    let toml = toml::to_string(sidecar).map_err(|e| Error::Validation(format!("sidecar: {e}")))?;
    crate::io::write_atomic(&files.sidecar, toml.as_bytes())?;
    let mut buf = Vec::new();
    super::write_commands(&mut buf, commands)?;
    crate::io::write_atomic(&files.commands, &buf)?;
    if let Some(p) = poses {
        buf.clear();
        super::write_poses(&mut buf, p)?;
        crate::io::write_atomic(&files.poses, &buf)?;
    }
    if let Some(v) = velocities {
        buf.clear();
        super::write_velocities(&mut buf, v)?;
        crate::io::write_atomic(&files.velocities, &buf)?;
    }
    Ok(())
}
