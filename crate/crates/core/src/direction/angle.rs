//! Azimuthal-equidistant map between unit 3-vectors and a 2-D angle plane
//! centered on +z.

use nalgebra::{Unit, UnitQuaternion, Vector2, Vector3};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `r = acos(p̂_z)` is the polar angle, `γ = atan2(p̂_y, p̂_x)` the azimuth;
/// the result is `(r cos γ, r sin γ)`.
pub fn vec2ang(p: &Vector3<f64>) -> Result<Vector2<f64>> {
    let n = p.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    let u = p / n;
    let r = u.z.clamp(-1.0, 1.0).acos();
    let gamma = u.y.atan2(u.x);
    Ok(Vector2::new(r * gamma.cos(), r * gamma.sin()))
}

/// Exact inverse of [`vec2ang`] on the open disc of radius pi.
pub fn ang2vec(theta: &Vector2<f64>) -> Result<Vector3<f64>> {
    let r = theta.norm();
    if !(r < PI) {
        return Err(Error::OutOfDomain { norm: r });
    }
    if r == 0.0 {
        return Ok(Vector3::z());
    }
    let (c, s) = (theta.x / r, theta.y / r);
    let sr = r.sin();
    Ok(Vector3::new(sr * c, sr * s, r.cos()))
}

/// Minimal rotation taking `mean_dir` to +z. Antiparallel input uses a half
/// turn about +x.
pub fn align_to_z(mean_dir: &Vector3<f64>) -> UnitQuaternion<f64> {
    let n = mean_dir.norm();
    if !(n > 0.0) {
        return UnitQuaternion::identity();
    }
    let u = mean_dir / n;
    let axis = u.cross(&Vector3::z());
    let s = axis.norm();
    let c = u.z;
    if s < 1e-12 {
        return if c > 0.0 {
            UnitQuaternion::identity()
        } else {
            UnitQuaternion::from_axis_angle(&Vector3::x_axis(), PI)
        };
    }
    UnitQuaternion::from_axis_angle(&Unit::new_unchecked(axis / s), s.atan2(c))
}
