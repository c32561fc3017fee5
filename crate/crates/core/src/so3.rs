//! Rotation logarithm and exponential on unit quaternions.

use nalgebra::{UnitQuaternion, Vector3};

use crate::error::{Error, Result};

/// Angles closer than this to pi have an ill-conditioned axis.
pub const NEAR_PI: f64 = 1e-6;

/// Axis-angle vector of a rotation, with norm in `[0, pi)`.
pub fn rotation_log(q: &UnitQuaternion<f64>) -> Result<Vector3<f64>> {
    let q = q.quaternion();
    // q and -q encode the same rotation; pick the representative with w >= 0
    let (w, v) = if q.w < 0.0 {
        (-q.w, -q.imag())
    } else {
        (q.w, q.imag())
    };
    let n = v.norm();
    let angle = 2.0 * n.atan2(w);
    if angle > std::f64::consts::PI - NEAR_PI {
        return Err(Error::AngleNearPi { angle });
    }
    if n < 1e-12 {
        // angle/sin(angle/2) -> 2/w as n -> 0
        return Ok(v * (2.0 / w));
    }
    Ok(v * (angle / n))
}

/// Rotation about `w/|w|` by `|w|`; the zero vector maps to identity.
pub fn rotation_exp(w: &Vector3<f64>) -> UnitQuaternion<f64> {
    UnitQuaternion::from_scaled_axis(*w)
}

/// Angle of the relative rotation between two orientations.
pub fn angle_between(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>) -> f64 {
    a.angle_to(b)
}
