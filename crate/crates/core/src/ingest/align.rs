//! Resampling of command and velocity streams onto one uniform grid.

use crate::error::{Error, Result};
use crate::kinematics::{BodyVelocity, VehicleSpec, WheelCommand};
use crate::mapping::TerrainClass;
use crate::scalar::Real;

use super::TimedVelocity;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignOptions<T> {
    pub grid_dt: T,
    pub max_gap: T,
}

impl<T: Real> Default for AlignOptions<T> {
    fn default() -> Self {
        Self {
            grid_dt: T::lit(0.05),
            max_gap: T::lit(0.2),
        }
    }
}

impl<T: Real> AlignOptions<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.grid_dt.is_finite() && self.grid_dt > T::zero()) {
            return Err(Error::param(format!("grid_dt must be > 0, got {}", self.grid_dt)));
        }
        if !(self.max_gap.is_finite() && self.max_gap >= self.grid_dt) {
            return Err(Error::param(format!(
                "max_gap ({}) must be >= grid_dt ({})",
                self.max_gap, self.grid_dt
            )));
        }
        Ok(())
    }
}

/// Identity of a dataset: what drove where.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMeta<T> {
    pub name: String,
    pub vehicle: VehicleSpec<T>,
    pub terrain: TerrainClass,
}

/// Commands and observed velocities sampled on the same timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedDataset<T> {
    meta: DatasetMeta<T>,
    grid_dt: T,
    commands: Vec<WheelCommand<T>>,
    velocities: Vec<TimedVelocity<T>>,
}

impl<T: Real> AlignedDataset<T> {
    pub fn new(
        meta: DatasetMeta<T>,
        grid_dt: T,
        commands: Vec<WheelCommand<T>>,
        velocities: Vec<TimedVelocity<T>>,
    ) -> Result<Self> {
        if !(grid_dt > T::zero()) {
            return Err(Error::param("grid_dt must be > 0"));
        }
        if commands.len() != velocities.len() {
            return Err(Error::Validation(format!(
                "{} commands but {} velocities",
                commands.len(),
                velocities.len()
            )));
        }
        if let Some((c, v)) = commands.iter().zip(&velocities).find(|(c, v)| c.t != v.t) {
            return Err(Error::Validation(format!(
                "command at t={} paired with velocity at t={}",
                c.t, v.t
            )));
        }
        Ok(Self {
            meta,
            grid_dt,
            commands,
            velocities,
        })
    }

    pub fn meta(&self) -> &DatasetMeta<T> {
        &self.meta
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn vehicle(&self) -> &VehicleSpec<T> {
        &self.meta.vehicle
    }

    pub fn grid_dt(&self) -> T {
        self.grid_dt
    }

    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    pub fn commands(&self) -> &[WheelCommand<T>] {
        &self.commands
    }

    pub fn velocities(&self) -> &[TimedVelocity<T>] {
        &self.velocities
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&WheelCommand<T>, &BodyVelocity<T>)> {
        self.commands.iter().zip(self.velocities.iter().map(|v| &v.velocity))
    }
}

/// Position of `t` inside a sorted time axis: left index and the
/// interpolation weight towards the right neighbour, plus the distance to the
/// nearest sample. `None` when `t` is outside the axis.
fn locate<T: Real>(times: &[T], t: T) -> Option<(usize, T, T)> {
    let first = *times.first()?;
    let last = *times.last()?;
    if t < first || t > last {
        return None;
    }
    let i = times.partition_point(|&s| s <= t) - 1;
    if times[i] == t {
        return Some((i, T::zero(), T::zero()));
    }
    let (t0, t1) = (times[i], times[i + 1]);
    let gap = (t - t0).min(t1 - t);
    Some((i, (t - t0) / (t1 - t0), gap))
}

fn lerp<T: Real>(a: T, b: T, w: T) -> T {
    if w == T::zero() {
        a
    } else {
        a + (b - a) * w
    }
}

fn check_sorted<T: Real>(times: &[T], what: &str) -> Result<()> {
    match times.windows(2).position(|w| !(w[1] > w[0])) {
        Some(i) => Err(Error::param(format!(
            "{what} timestamps must strictly increase (index {})",
            i + 1
        ))),
        None => Ok(()),
    }
}

/// Interpolates both streams onto a uniform grid over their common span.
///
/// Grid points are `start + k·grid_dt` for the overlap `[start, end]`. A point
/// is dropped when the nearest raw sample of either stream is more than
/// `max_gap` away. Nothing is extrapolated.
pub fn align<T: Real>(
    meta: DatasetMeta<T>,
    commands: &[WheelCommand<T>],
    velocities: &[TimedVelocity<T>],
    opts: AlignOptions<T>,
) -> Result<AlignedDataset<T>> {
    opts.validate()?;
    if commands.is_empty() || velocities.is_empty() {
        return Err(Error::InsufficientData(format!(
            "cannot align: {} commands, {} velocity samples",
            commands.len(),
            velocities.len()
        )));
    }
    let ct: Vec<T> = commands.iter().map(|c| c.t).collect();
    let vt: Vec<T> = velocities.iter().map(|v| v.t).collect();
    check_sorted(&ct, "command")?;
    check_sorted(&vt, "velocity")?;

    let start = ct[0].max(vt[0]);
    let end = ct[ct.len() - 1].min(vt[vt.len() - 1]);
    if start > end {
        return Err(Error::Alignment(format!(
            "command span [{}, {}] and velocity span [{}, {}] do not overlap",
            ct[0],
            ct[ct.len() - 1],
            vt[0],
            vt[vt.len() - 1]
        )));
    }

    let steps = ((end - start) / opts.grid_dt).floor().to_usize().unwrap_or(0);
    let snap = opts.grid_dt * T::lit(1e-9);
    let mut out_c = Vec::new();
    let mut out_v = Vec::new();
    for k in 0..=steps + 1 {
        let mut t = start + opts.grid_dt * T::from_usize_lossy(k);
        if t > end {
            if t - end <= snap {
                t = end;
            } else {
                break;
            }
        }
        let (Some((ci, cw, cgap)), Some((vi, vw, vgap))) = (locate(&ct, t), locate(&vt, t)) else {
            continue;
        };
        if cgap > opts.max_gap || vgap > opts.max_gap {
            continue;
        }
        let c0 = &commands[ci];
        let c1 = commands.get(ci + 1).unwrap_or(c0);
        out_c.push(WheelCommand {
            t,
            omega_l: lerp(c0.omega_l, c1.omega_l, cw),
            omega_r: lerp(c0.omega_r, c1.omega_r, cw),
        });
        let v0 = &velocities[vi].velocity;
        let v1 = velocities.get(vi + 1).map_or(v0, |v| &v.velocity);
        out_v.push(TimedVelocity {
            t,
            velocity: BodyVelocity {
                vx: lerp(v0.vx, v1.vx, vw),
                vy: lerp(v0.vy, v1.vy, vw),
                omega: lerp(v0.omega, v1.omega, vw),
            },
        });
        if t == end {
            break;
        }
    }
    if out_c.is_empty() {
        return Err(Error::Alignment(
            "every grid point fell inside a gap larger than max_gap".into(),
        ));
    }
    AlignedDataset::new(meta, opts.grid_dt, out_c, out_v)
}
