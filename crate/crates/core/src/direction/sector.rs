//! Per-step sectors of admissible pushing directions and their angle-plane
//! quadrilaterals.

use nalgebra::{UnitQuaternion, Vector2, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::angle::vec2ang;
use super::polygon::ConvexPolygon;
use crate::error::{Error, Result};
use crate::types::{Channel, LearnerConfig, MotionStep};

/// Below this angle between motion and reversed wrench the sector has no
/// defined plane.
pub const DEGENERATE_ANGLE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleRectangle {
    pub corners: ConvexPolygon,
    pub step_index: usize,
}

impl AngleRectangle {
    pub fn contains(&self, p: &Vector2<f64>, tol: f64) -> bool {
        self.corners.contains(p, tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sector {
    Rect {
        rect: AngleRectangle,
        degenerate: bool,
    },
    /// Wrench and motion point the same way: the sector would cover a
    /// half-space, so the step carries no information.
    Contrary,
}

fn any_orthogonal(a: &Vector3<f64>) -> Vector3<f64> {
    let pick = if a.x.abs() <= a.y.abs() && a.x.abs() <= a.z.abs() {
        Vector3::x()
    } else if a.y.abs() <= a.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    a.cross(&pick).normalize()
}

/// The four 3-D vectors bounding the widened sector between the motion
/// direction `motion` and the reversed wrench `neg_wrench`, plus a flag for
/// the degenerate (parallel) case.
pub fn sector_corners(
    motion: &Vector3<f64>,
    neg_wrench: &Vector3<f64>,
    eta: f64,
    xi: f64,
) -> Option<([Vector3<f64>; 4], bool)> {
    let angle = motion.dot(neg_wrench).clamp(-1.0, 1.0).acos();
    if angle > PI - DEGENERATE_ANGLE {
        return None;
    }
    // with no sector plane the cone is widened equally in both directions
    let (widen, perp, degenerate, xi) = if angle < DEGENERATE_ANGLE {
        let u = any_orthogonal(motion);
        (u, motion.cross(&u), true, eta)
    } else {
        (
            (neg_wrench - motion).normalize(),
            neg_wrench.cross(motion).normalize(),
            false,
            xi,
        )
    };
    let d1 = widen * xi.tan();
    let d2 = perp * eta.tan();
    Some((
        [
            motion - d1 + d2,
            motion - d1 - d2,
            neg_wrench + d1 + d2,
            neg_wrench + d1 - d2,
        ],
        degenerate,
    ))
}

/// Builds the angle-plane quadrilateral of one step after rotating by `align`.
pub fn sector_rectangle(
    step: &MotionStep,
    step_index: usize,
    channel: Channel,
    cfg: &LearnerConfig,
    align: &UnitQuaternion<f64>,
) -> Result<Sector> {
    let (Some(motion), Some(wrench)) = (step.motion_dir(channel), step.wrench_dir(channel)) else {
        return Err(Error::MissingDirection);
    };
    rectangle_from_dirs(&motion, &-wrench, step_index, cfg, align)
}

pub(crate) fn rectangle_from_dirs(
    motion: &Vector3<f64>,
    neg_wrench: &Vector3<f64>,
    step_index: usize,
    cfg: &LearnerConfig,
    align: &UnitQuaternion<f64>,
) -> Result<Sector> {
    let Some((corners, degenerate)) = sector_corners(
        motion,
        neg_wrench,
        cfg.eta_deg.to_radians(),
        cfg.xi_deg.to_radians(),
    ) else {
        return Ok(Sector::Contrary);
    };
    let projected = corners
        .iter()
        .map(|c| vec2ang(&(align * c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sector::Rect {
        rect: AngleRectangle {
            corners: ConvexPolygon::hull(&projected),
            step_index,
        },
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(v: Vector3<f64>, f: Vector3<f64>) -> MotionStep {
        MotionStep {
            dx: v,
            dbeta: Vector3::zeros(),
            v_hat: Some(v.normalize()),
            w_hat: None,
            f_hat: Some(f.normalize()),
            t_hat: None,
            f_raw: f,
            t_raw: Vector3::zeros(),
        }
    }

    #[test]
    fn zero_expansion_collapses_to_endpoints() {
        let a = Vector3::x();
        let m = Vector3::z();
        let (c, deg) = sector_corners(&a, &m, 0.0, 0.0).unwrap();
        assert!(!deg);
        assert_eq!(c[0], a);
        assert_eq!(c[1], a);
        assert_eq!(c[2], m);
        assert_eq!(c[3], m);
    }

    #[test]
    fn parallel_motion_and_reversed_wrench_uses_fallback() {
        let cfg = LearnerConfig::default();
        let s = step(Vector3::x(), -Vector3::x());
        match sector_rectangle(&s, 0, Channel::Translation, &cfg, &UnitQuaternion::identity()).unwrap() {
            Sector::Rect { rect, degenerate } => {
                assert!(degenerate);
                assert!(rect.corners.len() == 4);
                assert!(rect.corners.area() > 0.0);
            }
            Sector::Contrary => panic!("expected a rectangle"),
        }
    }

    #[test]
    fn wrench_along_motion_is_contrary() {
        let cfg = LearnerConfig::default();
        let s = step(Vector3::x(), Vector3::x());
        assert_eq!(
            sector_rectangle(&s, 0, Channel::Translation, &cfg, &UnitQuaternion::identity()).unwrap(),
            Sector::Contrary
        );
    }

    #[test]
    fn missing_wrench_is_an_error() {
        let mut s = step(Vector3::x(), Vector3::z());
        s.f_hat = None;
        assert!(matches!(
            sector_rectangle(&s, 0, Channel::Translation, &LearnerConfig::default(), &UnitQuaternion::identity()),
            Err(Error::MissingDirection)
        ));
    }

    #[test]
    fn floor_slide_sector_matches_friction_cone() {
        // motion +x on a floor with mu = 1: contact force (-N, 0, N)
        let n = 10.0;
        let f = Vector3::new(-n, 0.0, n);
        let a = Vector3::x();
        let m = -f.normalize();
        let (eta, xi) = (20f64.to_radians(), 10f64.to_radians());
        let (c, _) = sector_corners(&a, &m, eta, xi).unwrap();
        // the sector spans from +x down to (1,0,-1)/sqrt2 in the xz-plane
        assert!((m - Vector3::new(1.0, 0.0, -1.0) / 2f64.sqrt()).norm() < 1e-12);
        // every corner is pushed out of the xz-plane by exactly tan(eta)
        for corner in &c {
            assert!((corner.y.abs() - eta.tan()).abs() < 1e-12);
        }
        // the motion end widens above +x, the wrench end below -45 deg, each by at most xi
        let elev = |v: &Vector3<f64>| v.z.atan2(v.x);
        for corner in &c[..2] {
            let e = elev(corner);
            assert!(e > 0.0 && e <= xi + 1e-12, "{e}");
        }
        for corner in &c[2..] {
            let e = elev(corner) + std::f64::consts::FRAC_PI_4;
            assert!(e < 0.0 && e >= -xi - 1e-12, "{e}");
        }
    }
}
