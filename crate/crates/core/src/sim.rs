//! Synthetic datasets with known slip, for end-to-end checks of the metric.
//!
//! Commands come from a speed/yaw-rate profile. The "observed" body velocity
//! is the ideal twist distorted by a [`SlipModel`]:
//! target `((1−s)·f_x, c·b·f_ω, a·f_ω)`, optionally filtered by a first-order
//! lag with time constant `tau`, plus Gaussian noise. Poses are integrated
//! from the observed twist so both velocity and pose logs can be produced.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{write_dataset_dir, PoseSample, Sidecar, TimedVelocity};
use crate::kinematics::{ideal_diff_drive, BodyVelocity, VehicleSpec, WheelCommand};
use crate::scalar::{wrap_angle, Real};

/// Speed/yaw-rate shape of a generated command stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Linear ramp from rest to the target twist over the whole run.
    Ramp,
    /// Rest until `step_time`, then the target twist.
    Step,
    /// Forward speed oscillating between 0 and the target, yaw rate in
    /// quadrature.
    Sine,
    /// Seeded random walk bounded by the target twist.
    RandomWalk,
    /// Target twist and rest alternating every half `period`.
    Square,
    /// Ramp, step, sine and random walk, one per quarter of the run.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real"))]
pub struct ProfileParams<T> {
    /// Target forward speed [m/s]; defaults to the vehicle's `v_max`.
    #[serde(default)]
    pub speed: Option<T>,
    /// Target yaw rate [rad/s].
    #[serde(default)]
    pub yaw_rate: T,
    /// Step instant [s]; defaults to half the duration.
    #[serde(default)]
    pub step_time: Option<T>,
    /// Period of the sine and square profiles [s].
    #[serde(default = "default_period")]
    pub period: T,
}

fn default_period<T: Real>() -> T {
    T::lit(4.0)
}

fn unit<T: Real>() -> T {
    T::one()
}

impl<T: Real> Default for ProfileParams<T> {
    fn default() -> Self {
        Self {
            speed: None,
            yaw_rate: T::zero(),
            step_time: None,
            period: default_period(),
        }
    }
}

/// Scales `(v, ω)` down so neither wheel's rim speed exceeds `v_max`.
fn limit_twist<T: Real>(v: T, w: T, spec: &VehicleSpec<T>) -> (T, T) {
    let half_track = spec.track_width() * T::lit(0.5);
    let rim = (v - w * half_track).abs().max((v + w * half_track).abs());
    if rim > spec.v_max() {
        let k = spec.v_max() / rim;
        (v * k, w * k)
    } else {
        (v, w)
    }
}

struct Shaper<'a, T> {
    params: &'a ProfileParams<T>,
    speed: T,
    duration: T,
    rng: ChaCha8Rng,
    walk: (T, T),
}

impl<T: Real> Shaper<'_, T> {
    fn twist(&mut self, profile: Profile, t: T, start: T, span: T, dt: T) -> (T, T) {
        let (v, w) = (self.speed, self.params.yaw_rate);
        let local = t - start;
        let two_pi = T::PI() + T::PI();
        match profile {
            Profile::Ramp => {
                let s = local / span;
                (v * s, w * s)
            }
            Profile::Step => {
                let step = self.params.step_time.unwrap_or(self.duration * T::lit(0.5));
                // inside a mixed run the step lands half way through its segment
                let at = if span < self.duration { span * T::lit(0.5) } else { step };
                if local >= at {
                    (v, w)
                } else {
                    (T::zero(), T::zero())
                }
            }
            Profile::Sine => {
                let phase = two_pi * local / self.params.period;
                (v * T::lit(0.5) * (T::one() + phase.sin()), w * phase.cos())
            }
            Profile::Square => {
                let half = self.params.period * T::lit(0.5);
                let k = (local / half).floor().to_i64().unwrap_or(0);
                if k % 2 == 0 {
                    (v, w)
                } else {
                    (T::zero(), T::zero())
                }
            }
            Profile::RandomWalk => {
                let yaw_bound = if w == T::zero() { T::lit(0.5) } else { w.abs() };
                let sq = dt.sqrt();
                let dv = T::lit(self.rng.random_range(-1.0..1.0)) * T::lit(0.3) * v * sq;
                let dw = T::lit(self.rng.random_range(-1.0..1.0)) * T::lit(0.6) * yaw_bound * sq;
                let (cv, cw) = self.walk;
                self.walk = (
                    (cv + dv).max(T::zero()).min(v),
                    (cw + dw).max(-yaw_bound).min(yaw_bound),
                );
                self.walk
            }
            Profile::Mixed => unreachable!("mixed is expanded by the caller"),
        }
    }
}

/// Samples `round(duration/dt)` commands at `t = k·dt`.
pub fn generate_commands<T: Real>(
    profile: Profile,
    params: &ProfileParams<T>,
    duration: T,
    dt: T,
    spec: &VehicleSpec<T>,
    seed: u64,
) -> Result<Vec<WheelCommand<T>>> {
    if !(duration.is_finite() && duration > T::zero()) {
        return Err(Error::param(format!("duration must be > 0, got {duration}")));
    }
    if !(dt.is_finite() && dt > T::zero() && dt <= duration) {
        return Err(Error::param(format!("dt must lie in (0, duration], got {dt}")));
    }
    let speed = params.speed.unwrap_or(spec.v_max());
    if !(speed.is_finite() && speed >= T::zero()) {
        return Err(Error::param(format!("profile speed must be >= 0, got {speed}")));
    }
    if !params.yaw_rate.is_finite() {
        return Err(Error::param("profile yaw rate must be finite"));
    }
    if !(params.period.is_finite() && params.period > T::zero()) {
        return Err(Error::param(format!("profile period must be > 0, got {}", params.period)));
    }
    if let Some(st) = params.step_time {
        if !(st >= T::zero() && st <= duration) {
            return Err(Error::param(format!("step_time {st} outside [0, {duration}]")));
        }
    }
    let n = (duration / dt).round().to_usize().unwrap_or(0).max(1);
    let mut shaper = Shaper {
        params,
        speed,
        duration,
        rng: ChaCha8Rng::seed_from_u64(seed),
        walk: (T::zero(), T::zero()),
    };
    let quarter = duration * T::lit(0.25);
    let r = spec.wheel_radius();
    let half_track = spec.track_width() * T::lit(0.5);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let t = dt * T::from_usize_lossy(k);
        let (v, w) = match profile {
            Profile::Mixed => {
                let seg = (t / quarter).floor().to_usize().unwrap_or(0).min(3);
                let start = quarter * T::from_usize_lossy(seg);
                let sub = [Profile::Ramp, Profile::Step, Profile::Sine, Profile::RandomWalk][seg];
                shaper.twist(sub, t, start, quarter, dt)
            }
            p => shaper.twist(p, t, T::zero(), duration, dt),
        };
        let (v, w) = limit_twist(v, w, spec);
        out.push(WheelCommand {
            t,
            omega_l: (v - w * half_track) / r,
            omega_r: (v + w * half_track) / r,
        });
    }
    Ok(out)
}

/// Generative distortion applied to the ideal twist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real"))]
pub struct SlipModel<T> {
    /// Longitudinal slip fraction `s`: observed `vx = (1−s)·f_x`.
    #[serde(default)]
    pub lon_slip: T,
    /// Lateral coupling `c`: observed `vy = c·b·f_ω`, `b` the track width.
    #[serde(default)]
    pub lat_coupling: T,
    /// Angular scale `a`: observed `ω = a·f_ω`.
    #[serde(default = "unit")]
    pub ang_scale: T,
    /// First-order lag time constant [s]; 0 is instantaneous.
    #[serde(default)]
    pub tau: T,
    /// Standard deviation of the additive noise on every channel.
    #[serde(default)]
    pub noise_sigma: T,
}

impl<T: Real> Default for SlipModel<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> SlipModel<T> {
    pub fn identity() -> Self {
        Self {
            lon_slip: T::zero(),
            lat_coupling: T::zero(),
            ang_scale: T::one(),
            tau: T::zero(),
            noise_sigma: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lon_slip >= T::zero()
            && self.lon_slip < T::one()
            && self.lat_coupling.is_finite()
            && self.ang_scale > T::zero()
            && self.ang_scale <= T::one()
            && self.tau >= T::zero()
            && self.tau.is_finite()
            && self.noise_sigma >= T::zero()
            && self.noise_sigma.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!(
                "slip model out of range (need 0<=s<1, 0<a<=1, tau>=0, sigma>=0): {self:?}"
            )))
        }
    }

    fn target(&self, f: &BodyVelocity<T>, track_width: T) -> BodyVelocity<T> {
        BodyVelocity {
            vx: (T::one() - self.lon_slip) * f.vx,
            vy: self.lat_coupling * track_width * f.omega,
            omega: self.ang_scale * f.omega,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput<T> {
    pub velocities: Vec<TimedVelocity<T>>,
    pub poses: Vec<PoseSample<T>>,
}

/// Produces observed velocities and poses for `commands` under `model`.
///
/// The lag is discretized exactly for piecewise-constant targets:
/// `v ← target + (v − target)·exp(−Δt/tau)`, starting from rest, so a step
/// response sampled on the command grid is `1 − exp(−t/tau)` with no
/// integration error. Poses integrate the trapezoidal mean twist of each
/// interval at the midpoint heading, starting at the origin.
pub fn apply_slip<T: Real>(
    commands: &[WheelCommand<T>],
    spec: &VehicleSpec<T>,
    model: &SlipModel<T>,
    seed: u64,
) -> Result<SimOutput<T>> {
    model.validate()?;
    if commands.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::param("command timestamps must strictly increase"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let sigma = model.noise_sigma.to_f64_lossy();
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::param(e.to_string()))?;
    let mut jitter = |x: T| {
        if sigma > 0.0 {
            x + T::lit(noise.sample(&mut rng))
        } else {
            x
        }
    };

    let mut state = BodyVelocity::zero();
    let mut velocities = Vec::with_capacity(commands.len());
    for (k, cmd) in commands.iter().enumerate() {
        let target = model.target(&ideal_diff_drive(cmd, spec), spec.track_width());
        let clean = if model.tau > T::zero() { state } else { target };
        velocities.push(TimedVelocity {
            t: cmd.t,
            velocity: BodyVelocity {
                vx: jitter(clean.vx),
                vy: jitter(clean.vy),
                omega: jitter(clean.omega),
            },
        });
        if model.tau > T::zero() {
            if let Some(next) = commands.get(k + 1) {
                let decay = (-(next.t - cmd.t) / model.tau).exp();
                state = target + (state - target).scale(decay);
            }
        }
    }

    let mut poses = Vec::with_capacity(commands.len());
    let (mut x, mut y, mut yaw) = (T::zero(), T::zero(), T::zero());
    if let Some(first) = velocities.first() {
        poses.push(PoseSample { t: first.t, x, y, yaw });
    }
    let half = T::lit(0.5);
    for w in velocities.windows(2) {
        let dt = w[1].t - w[0].t;
        let mean = (w[0].velocity + w[1].velocity).scale(half);
        let (s, c) = (yaw + mean.omega * dt * half).sin_cos();
        x = x + dt * (mean.vx * c - mean.vy * s);
        y = y + dt * (mean.vx * s + mean.vy * c);
        yaw = yaw + mean.omega * dt;
        poses.push(PoseSample {
            t: w[1].t,
            x,
            y,
            yaw: wrap_angle(yaw),
        });
    }
    Ok(SimOutput { velocities, poses })
}

/// Scenario file (TOML):
///
/// ```toml
/// name = "husky_slip"
/// terrain = "tile"
/// profile = "step"          # ramp | step | sine | random_walk | square | mixed
/// duration = 60.0           # [s]
/// dt = 0.05                 # [s]
/// seed = 7
///
/// [vehicle]
/// name = "husky"
/// wheel_radius = 0.165
/// track_width = 0.555
/// mass = 75.0
/// v_max = 1.0
///
/// [profile_params]          # optional
/// speed = 1.0
/// yaw_rate = 0.0
/// step_time = 0.0
/// period = 4.0
///
/// [slip]                    # optional, identity when absent
/// lon_slip = 0.2
/// lat_coupling = 0.0
/// ang_scale = 1.0
/// tau = 0.0
/// noise_sigma = 0.0
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real"))]
pub struct Scenario<T> {
    pub name: String,
    pub terrain: String,
    pub profile: Profile,
    pub duration: T,
    pub dt: T,
    #[serde(default)]
    pub seed: u64,
    pub vehicle: VehicleSpec<T>,
    #[serde(default)]
    pub profile_params: ProfileParams<T>,
    #[serde(default)]
    pub slip: SlipModel<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimDataset<T> {
    pub sidecar: Sidecar<T>,
    pub commands: Vec<WheelCommand<T>>,
    pub velocities: Vec<TimedVelocity<T>>,
    pub poses: Vec<PoseSample<T>>,
}

impl<T: Real> Scenario<T> {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: None,
            line: e
                .span()
                .map_or(0, |s| text[..s.start].matches('\n').count() as u64 + 1),
            message: e.message().to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| e.with_path(path))
    }

    pub fn run(&self) -> Result<SimDataset<T>> {
        self.slip.validate()?;
        let commands = generate_commands(
            self.profile,
            &self.profile_params,
            self.duration,
            self.dt,
            &self.vehicle,
            self.seed,
        )?;
        let out = apply_slip(&commands, &self.vehicle, &self.slip, self.seed)?;
        Ok(SimDataset {
            sidecar: Sidecar::from_spec(self.name.clone(), &self.vehicle, self.terrain.clone()),
            commands,
            velocities: out.velocities,
            poses: out.poses,
        })
    }
}

impl<T: Real> SimDataset<T> {
    /// Writes the sidecar and all three logs.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_dataset_dir(dir, &self.sidecar, &self.commands, Some(&self.poses), Some(&self.velocities))
    }
}
