//! Ideal slip-less motion models and the slip vector.
//!
//! The slip (motion distortion) at a time step is the difference between the
//! body twist predicted by an ideal rolling-without-slipping model and the
//! body twist actually observed by localization. Its modulus is the
//! per-step difficulty metric.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Planar twist in the robot body frame: `vx` longitudinal [m/s],
/// `vy` lateral [m/s], `omega` yaw rate [rad/s].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BodyVelocity<T> {
    pub vx: T,
    pub vy: T,
    pub omega: T,
}

impl<T: Real> BodyVelocity<T> {
    pub fn new(vx: T, vy: T, omega: T) -> Result<Self> {
        if !(vx.is_finite() && vy.is_finite() && omega.is_finite()) {
            return Err(Error::param(format!(
                "body velocity must be finite, got ({vx}, {vy}, {omega})"
            )));
        }
        Ok(Self { vx, vy, omega })
    }

    pub fn zero() -> Self {
        Self {
            vx: T::zero(),
            vy: T::zero(),
            omega: T::zero(),
        }
    }

    pub fn scale(self, k: T) -> Self {
        Self {
            vx: self.vx * k,
            vy: self.vy * k,
            omega: self.omega * k,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.vx.is_finite() && self.vy.is_finite() && self.omega.is_finite()
    }
}

impl<T: Real> std::ops::Sub for BodyVelocity<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self {
            vx: self.vx - rhs.vx,
            vy: self.vy - rhs.vy,
            omega: self.omega - rhs.omega,
        }
    }
}

impl<T: Real> std::ops::Add for BodyVelocity<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            vx: self.vx + rhs.vx,
            vy: self.vy + rhs.vy,
            omega: self.omega + rhs.omega,
        }
    }
}

impl<'de, T: Real> Deserialize<'de> for BodyVelocity<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw<T> {
            vx: T,
            vy: T,
            omega: T,
        }
        let raw = Raw::<T>::deserialize(d)?;
        BodyVelocity::new(raw.vx, raw.vy, raw.omega).map_err(serde::de::Error::custom)
    }
}

/// Timestamped left/right wheel angular velocities of a skid-steer vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WheelCommand<T> {
    pub t: T,
    pub omega_l: T,
    pub omega_r: T,
}

impl<T: Real> WheelCommand<T> {
    pub fn new(t: T, omega_l: T, omega_r: T) -> Result<Self> {
        if !(t.is_finite() && omega_l.is_finite() && omega_r.is_finite()) {
            return Err(Error::param(format!(
                "wheel command must be finite, got t={t} ({omega_l}, {omega_r})"
            )));
        }
        Ok(Self { t, omega_l, omega_r })
    }
}

/// Timestamped forward speed and steering angle for an Ackermann vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AckermannCommand<T> {
    pub t: T,
    pub v_cmd: T,
    pub delta: T,
}

impl<T: Real> AckermannCommand<T> {
    pub fn new(t: T, v_cmd: T, delta: T) -> Result<Self> {
        if !(t.is_finite() && v_cmd.is_finite() && delta.is_finite()) {
            return Err(Error::param("ackermann command must be finite"));
        }
        if delta.abs() >= T::FRAC_PI_2() {
            return Err(Error::param(format!(
                "steering angle {delta} rad must satisfy |delta| < pi/2"
            )));
        }
        Ok(Self { t, v_cmd, delta })
    }
}

/// Geometric and inertial parameters of a vehicle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VehicleSpec<T> {
    name: String,
    wheel_radius: T,
    track_width: T,
    mass: T,
    v_max: T,
    wheelbase: Option<T>,
}

fn positive<T: Real>(what: &str, x: T) -> Result<T> {
    if x.is_finite() && x > T::zero() {
        Ok(x)
    } else {
        Err(Error::param(format!("{what} must be positive and finite, got {x}")))
    }
}

impl<T: Real> VehicleSpec<T> {
    pub fn new(
        name: impl Into<String>,
        wheel_radius: T,
        track_width: T,
        mass: T,
        v_max: T,
    ) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            wheel_radius: positive("wheel radius", wheel_radius)?,
            track_width: positive("track width", track_width)?,
            mass: positive("mass", mass)?,
            v_max: positive("v_max", v_max)?,
            wheelbase: None,
        })
    }

    pub fn with_wheelbase(mut self, wheelbase: T) -> Result<Self> {
        self.wheelbase = Some(positive("wheelbase", wheelbase)?);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn wheel_radius(&self) -> T {
        self.wheel_radius
    }

    pub fn track_width(&self) -> T {
        self.track_width
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn v_max(&self) -> T {
        self.v_max
    }

    pub fn wheelbase(&self) -> Option<T> {
        self.wheelbase
    }
}

impl<'de, T: Real> Deserialize<'de> for VehicleSpec<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw<T> {
            name: String,
            wheel_radius: T,
            track_width: T,
            mass: T,
            v_max: T,
            wheelbase: Option<T>,
        }
        let raw = Raw::<T>::deserialize(d)?;
        let spec = VehicleSpec::new(raw.name, raw.wheel_radius, raw.track_width, raw.mass, raw.v_max)
            .map_err(serde::de::Error::custom)?;
        match raw.wheelbase {
            Some(l) => spec.with_wheelbase(l).map_err(serde::de::Error::custom),
            None => Ok(spec),
        }
    }
}

/// Ideal differential-drive twist: `r·(ωl+ωr)/2` forward, no lateral motion,
/// `r·(ωr−ωl)/b` yaw rate.
pub fn ideal_diff_drive<T: Real>(cmd: &WheelCommand<T>, spec: &VehicleSpec<T>) -> BodyVelocity<T> {
    let r = spec.wheel_radius;
    let half = T::lit(0.5);
    BodyVelocity {
        vx: r * (cmd.omega_l + cmd.omega_r) * half,
        vy: T::zero(),
        omega: r * (cmd.omega_r - cmd.omega_l) / spec.track_width,
    }
}

/// Kinematic bicycle referenced at the rear axle: `(v, 0, v·tan(δ)/L)`.
pub fn ideal_bicycle<T: Real>(
    cmd: &AckermannCommand<T>,
    spec: &VehicleSpec<T>,
) -> Result<BodyVelocity<T>> {
    let wheelbase = spec.wheelbase.ok_or_else(|| {
        Error::param(format!("vehicle '{}' has no wheelbase for the bicycle model", spec.name))
    })?;
    Ok(BodyVelocity {
        vx: cmd.v_cmd,
        vy: T::zero(),
        omega: cmd.v_cmd * cmd.delta.tan() / wheelbase,
    })
}

/// Slip body velocity `g = f − v_obs`.
pub fn slip<T: Real>(ideal: &BodyVelocity<T>, observed: &BodyVelocity<T>) -> BodyVelocity<T> {
    *ideal - *observed
}

/// Length scale [m] applied to the yaw-rate component of the slip before
/// taking the norm. The default of 1 gives the plain Euclidean norm of the
/// mixed-unit triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AngularWeight<T>(T);

impl<T: Real> AngularWeight<T> {
    pub fn new(w: T) -> Result<Self> {
        if w.is_finite() && w >= T::zero() {
            Ok(Self(w))
        } else {
            Err(Error::param(format!("angular weight must be >= 0, got {w}")))
        }
    }

    pub fn get(self) -> T {
        self.0
    }
}

impl<T: Real> Default for AngularWeight<T> {
    fn default() -> Self {
        Self(T::one())
    }
}

/// Modulus of the slip vector, `sqrt(gx² + gy² + (w·gω)²)`.
pub fn slip_modulus<T: Real>(g: &BodyVelocity<T>, weight: AngularWeight<T>) -> T {
    let w = g.omega * weight.0;
    (g.vx * g.vx + g.vy * g.vy + w * w).sqrt()
}
