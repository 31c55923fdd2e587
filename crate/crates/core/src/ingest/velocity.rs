//! Observed body velocity from a pose sequence by finite differences.

use crate::error::{Error, Result};
use crate::kinematics::BodyVelocity;
use crate::scalar::{wrap_angle, Real};

use super::{PoseSample, TimedVelocity};

/// Finite-difference scheme used on the pose stream.
///
/// Both schemes use the window `[i-1, i+1]` on interior samples and a
/// one-sided window at the two ends, and take the yaw rate from the
/// unwrapped heading difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FiniteDifference {
    /// World-frame chord `(Δx, Δy)/Δt` rotated into the body frame by the
    /// heading of the centre sample.
    Chord,
    /// Relative pose between the window ends mapped through the SE(2)
    /// logarithm. Exact for any constant body twist, arcs included.
    #[default]
    Se2,
}

/// Unwrapped headings: consecutive differences are wrapped into `(-pi, pi]`
/// and accumulated.
fn unwrap_yaw<T: Real>(poses: &[PoseSample<T>]) -> Vec<T> {
    let mut out = Vec::with_capacity(poses.len());
    let mut acc = poses[0].yaw;
    out.push(acc);
    for w in poses.windows(2) {
        acc = acc + wrap_angle(w[1].yaw - w[0].yaw);
        out.push(acc);
    }
    out
}

/// `(sin θ / θ, (1 − cos θ) / θ)` with series fallbacks near zero.
fn left_jacobian_terms<T: Real>(theta: T) -> (T, T) {
    if theta.abs() < T::lit(1e-4) {
        let t2 = theta * theta;
        (
            T::one() - t2 / T::lit(6.0),
            theta * (T::lit(0.5) - t2 / T::lit(24.0)),
        )
    } else {
        (theta.sin() / theta, (T::one() - theta.cos()) / theta)
    }
}

fn twist_between<T: Real>(
    a: &PoseSample<T>,
    b: &PoseSample<T>,
    yaw_a: T,
    yaw_b: T,
    centre_yaw: T,
    scheme: FiniteDifference,
) -> BodyVelocity<T> {
    let dt = b.t - a.t;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let dtheta = yaw_b - yaw_a;
    match scheme {
        FiniteDifference::Chord => {
            let (s, c) = centre_yaw.sin_cos();
            BodyVelocity {
                vx: (c * dx + s * dy) / dt,
                vy: (-s * dx + c * dy) / dt,
                omega: dtheta / dt,
            }
        }
        FiniteDifference::Se2 => {
            let (s, c) = yaw_a.sin_cos();
            let px = c * dx + s * dy;
            let py = -s * dx + c * dy;
            // V(θ) = [[A, -B], [B, A]]; invert the 2x2 rotation-scaling block
            let (ja, jb) = left_jacobian_terms(dtheta);
            let det = ja * ja + jb * jb;
            BodyVelocity {
                vx: (ja * px + jb * py) / det / dt,
                vy: (-jb * px + ja * py) / det / dt,
                omega: dtheta / dt,
            }
        }
    }
}

/// Estimates body-frame velocity at every pose timestamp.
pub fn body_velocity_from_poses<T: Real>(
    poses: &[PoseSample<T>],
    scheme: FiniteDifference,
) -> Result<Vec<TimedVelocity<T>>> {
    if poses.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 poses to differentiate, got {}",
            poses.len()
        )));
    }
    for (i, w) in poses.windows(2).enumerate() {
        if w[1].t <= w[0].t {
            return Err(Error::parse(
                i as u64 + 2,
                format!("pose timestamps must strictly increase ({} then {})", w[0].t, w[1].t),
            ));
        }
    }
    let yaw = unwrap_yaw(poses);
    let n = poses.len();
    let out = (0..n)
        .map(|i| {
            let (lo, hi) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            let velocity = twist_between(&poses[lo], &poses[hi], yaw[lo], yaw[hi], yaw[i], scheme);
            TimedVelocity {
                t: poses[i].t,
                velocity,
            }
        })
        .collect();
    Ok(out)
}
