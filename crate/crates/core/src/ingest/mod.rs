//! Log ingestion: CSV streams, pose differentiation, and time alignment.

mod align;
pub(crate) mod csvio;
mod dataset;
mod velocity;

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::{BodyVelocity, WheelCommand};
use crate::scalar::{wrap_angle, Real};

pub use align::{align, AlignOptions, AlignedDataset, DatasetMeta};
pub use dataset::{
    load_dataset_dir, write_dataset_dir, DatasetFiles, LoadedDataset, Sidecar, VelocitySource,
    COMMANDS_FILE, POSES_FILE, SIDECAR_FILE, VELOCITIES_FILE,
};
pub use velocity::{body_velocity_from_poses, FiniteDifference};

/// Planar pose sample; yaw is kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoseSample<T> {
    pub t: T,
    pub x: T,
    pub y: T,
    pub yaw: T,
}

impl<T: Real> PoseSample<T> {
    pub fn new(t: T, x: T, y: T, yaw: T) -> Result<Self> {
        if !(t.is_finite() && x.is_finite() && y.is_finite() && yaw.is_finite()) {
            return Err(Error::param("pose sample must be finite"));
        }
        Ok(Self {
            t,
            x,
            y,
            yaw: wrap_angle(yaw),
        })
    }
}

/// Body velocity stamped with its time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimedVelocity<T> {
    pub t: T,
    pub velocity: BodyVelocity<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogFormat {
    /// `t,omega_l,omega_r`
    CommandCsv,
    /// `t,x,y,yaw`
    PoseCsv,
    /// `t,vx,vy,omega`, body frame
    VelocityCsv,
}

impl LogFormat {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            LogFormat::CommandCsv => &["t", "omega_l", "omega_r"],
            LogFormat::PoseCsv => &["t", "x", "y", "yaw"],
            LogFormat::VelocityCsv => &["t", "vx", "vy", "omega"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawStream<T> {
    Commands(Vec<WheelCommand<T>>),
    Poses(Vec<PoseSample<T>>),
    Velocities(Vec<TimedVelocity<T>>),
}

impl<T> RawStream<T> {
    pub fn len(&self) -> usize {
        match self {
            RawStream::Commands(v) => v.len(),
            RawStream::Poses(v) => v.len(),
            RawStream::Velocities(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Parses a log file. Rows come back in file order; timestamps must be
/// strictly increasing. A file with only a header (or nothing) is an empty
/// stream.
pub fn parse_log<T: Real>(path: &Path, format: LogFormat) -> Result<RawStream<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_log(BufReader::new(file), format).map_err(|e| e.with_path(path))
}

pub fn read_log<T: Real, R: Read>(reader: R, format: LogFormat) -> Result<RawStream<T>> {
    let rows = read_rows::<T, R, 4>(reader, format)?;
    Ok(match format {
        LogFormat::CommandCsv => RawStream::Commands(
            rows.into_iter()
                .map(|[t, l, r, _]| WheelCommand { t, omega_l: l, omega_r: r })
                .collect(),
        ),
        LogFormat::PoseCsv => RawStream::Poses(
            rows.into_iter()
                .map(|[t, x, y, yaw]| PoseSample { t, x, y, yaw: wrap_angle(yaw) })
                .collect(),
        ),
        LogFormat::VelocityCsv => RawStream::Velocities(
            rows.into_iter()
                .map(|[t, vx, vy, omega]| TimedVelocity {
                    t,
                    velocity: BodyVelocity { vx, vy, omega },
                })
                .collect(),
        ),
    })
}

fn read_rows<T: Real, R: Read, const N: usize>(reader: R, format: LogFormat) -> Result<Vec<[T; N]>> {
    let mut rdr = csvio::reader(reader);
    if csvio::is_empty(&mut rdr)? {
        return Ok(Vec::new());
    }
    let names = format.columns();
    let cols = csvio::columns(&mut rdr, names)?;
    let mut out = Vec::new();
    let mut prev = None;
    for rec in rdr.records() {
        let (rec, line) = csvio::record(rec)?;
        let mut row = [T::zero(); N];
        for (k, (&idx, name)) in cols.iter().zip(names).enumerate() {
            row[k] = csvio::number(&rec, idx, name, line)?;
        }
        csvio::check_monotonic(&mut prev, row[0], line)?;
        out.push(row);
    }
    Ok(out)
}

pub fn read_commands<T: Real, R: Read>(reader: R) -> Result<Vec<WheelCommand<T>>> {
    match read_log(reader, LogFormat::CommandCsv)? {
        RawStream::Commands(c) => Ok(c),
        _ => unreachable!(),
    }
}

pub fn read_poses<T: Real, R: Read>(reader: R) -> Result<Vec<PoseSample<T>>> {
    match read_log(reader, LogFormat::PoseCsv)? {
        RawStream::Poses(p) => Ok(p),
        _ => unreachable!(),
    }
}

pub fn read_velocities<T: Real, R: Read>(reader: R) -> Result<Vec<TimedVelocity<T>>> {
    match read_log(reader, LogFormat::VelocityCsv)? {
        RawStream::Velocities(v) => Ok(v),
        _ => unreachable!(),
    }
}

fn write_rows<T: Real, W: Write>(
    writer: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<T>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header).map_err(csvio::write_err)?;
    for row in rows {
        w.write_record(row.iter().map(|x| x.to_string())).map_err(csvio::write_err)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))
}

pub fn write_commands<T: Real, W: Write>(writer: W, cmds: &[WheelCommand<T>]) -> Result<()> {
    write_rows(
        writer,
        LogFormat::CommandCsv.columns(),
        cmds.iter().map(|c| vec![c.t, c.omega_l, c.omega_r]),
    )
}

pub fn write_poses<T: Real, W: Write>(writer: W, poses: &[PoseSample<T>]) -> Result<()> {
    write_rows(
        writer,
        LogFormat::PoseCsv.columns(),
        poses.iter().map(|p| vec![p.t, p.x, p.y, p.yaw]),
    )
}

pub fn write_velocities<T: Real, W: Write>(writer: W, vels: &[TimedVelocity<T>]) -> Result<()> {
    write_rows(
        writer,
        LogFormat::VelocityCsv.columns(),
        vels.iter()
            .map(|v| vec![v.t, v.velocity.vx, v.velocity.vy, v.velocity.omega]),
    )
}
