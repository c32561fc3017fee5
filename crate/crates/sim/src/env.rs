//! Planar-facet contact world.
//!
//! Obstacles are convex solids, each the intersection of the inner
//! half-spaces of the facets sharing a `solid` id (a facet without an id is
//! a solid on its own). Body probe points collide with these solids. The
//! optional `body_faces` describe the body itself as one convex solid in body
//! coordinates, and environment `corners` collide with it; this covers a hole
//! edge pressing on the flank of a peg.

use std::collections::BTreeMap;

use compliant_core::so3::angle_between;
use compliant_core::Pose;
use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

const UNIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub p: Vector3<f64>,
    /// Outward normal, pointing into free space.
    pub n: Vector3<f64>,
    #[serde(default)]
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solid: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corner {
    pub p: Vector3<f64>,
    #[serde(default)]
    pub mu: f64,
}

/// A face of the body solid, in body coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyFace {
    pub p: Vector3<f64>,
    pub n: Vector3<f64>,
}

/// Pose as stored in files: position plus `[w, x, y, z]` quaternion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseSpec {
    pub p: Vector3<f64>,
    #[serde(default = "identity_wxyz")]
    pub q: [f64; 4],
}

fn identity_wxyz() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

impl PoseSpec {
    pub fn to_pose(&self) -> Result<Pose> {
        Ok(Pose::from_wxyz(self.p.into(), self.q)?)
    }
}

impl From<&Pose> for PoseSpec {
    fn from(p: &Pose) -> Self {
        PoseSpec {
            p: p.position,
            q: p.wxyz(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Goal {
    pub pose: PoseSpec,
    pub tol_pos: f64,
    pub tol_rot: f64,
    /// Position axes along which the goal is a line or plane.
    #[serde(default)]
    pub free_axes: [bool; 3],
    /// Body axis about which the goal orientation is free. The rotation
    /// error is then the angle between this axis and its goal direction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_spin: Option<Vector3<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    #[serde(default)]
    pub name: String,
    pub facets: Vec<Facet>,
    #[serde(default)]
    pub corners: Vec<Corner>,
    #[serde(default)]
    pub body_faces: Vec<BodyFace>,
    /// Contact points on the body, in body coordinates.
    pub probes: Vec<Vector3<f64>>,
    pub goal: Goal,
    pub bounds: Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContactSource {
    Probe { probe: usize, facet: usize },
    Corner { corner: usize, face: usize },
}

/// A potential contact: the force on the body acts along `normal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub point: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub mu: f64,
    pub gap: f64,
    pub source: ContactSource,
}

impl Environment {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let env: Environment = serde_json::from_str(s)?;
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SimError::InvalidEnvironment(m));
        for (i, f) in self.facets.iter().enumerate() {
            if (f.n.norm() - 1.0).abs() > UNIT_TOL {
                return bad(format!("facet {i} normal is not unit"));
            }
            if !(f.mu >= 0.0) {
                return bad(format!("facet {i} has negative friction"));
            }
        }
        for (i, c) in self.corners.iter().enumerate() {
            if !(c.mu >= 0.0) {
                return bad(format!("corner {i} has negative friction"));
            }
        }
        for (i, f) in self.body_faces.iter().enumerate() {
            if (f.n.norm() - 1.0).abs() > UNIT_TOL {
                return bad(format!("body face {i} normal is not unit"));
            }
        }
        self.goal.validate()?;
        if (0..3).any(|i| !(self.bounds.min[i] < self.bounds.max[i])) {
            return bad("bounds are empty".into());
        }
        Ok(())
    }

    /// Facet indices grouped by solid.
    pub fn solids(&self) -> Vec<Vec<usize>> {
        let mut named: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut out = Vec::new();
        for (i, f) in self.facets.iter().enumerate() {
            match f.solid {
                Some(id) => named.entry(id).or_default().push(i),
                None => out.push(vec![i]),
            }
        }
        out.extend(named.into_values());
        out
    }

    pub fn probe_world(&self, pose: &Pose, probe: usize) -> Vector3<f64> {
        pose.position + pose.orientation * self.probes[probe]
    }

    /// All point/solid pairs closer than `margin` (negative gap = penetration).
    pub fn contacts(&self, pose: &Pose, margin: f64) -> Vec<Contact> {
        let mut out = Vec::new();
        let solids = self.solids();
        for probe in 0..self.probes.len() {
            let q = self.probe_world(pose, probe);
            for solid in &solids {
                let (facet, gap) = deepest(solid.iter().map(|&i| {
                    let f = &self.facets[i];
                    (i, f.n.dot(&(q - f.p)))
                }));
                if gap < margin {
                    let f = &self.facets[facet];
                    out.push(Contact {
                        point: q,
                        normal: f.n,
                        mu: f.mu,
                        gap,
                        source: ContactSource::Probe { probe, facet },
                    });
                }
            }
        }
        if !self.body_faces.is_empty() {
            let inv = pose.orientation.inverse();
            for (ci, c) in self.corners.iter().enumerate() {
                let local = inv * (c.p - pose.position);
                let (face, gap) = deepest(
                    self.body_faces
                        .iter()
                        .enumerate()
                        .map(|(i, f)| (i, f.n.dot(&(local - f.p)))),
                );
                if gap < margin {
                    out.push(Contact {
                        point: c.p,
                        normal: -(pose.orientation * self.body_faces[face].n),
                        mu: c.mu,
                        gap,
                        source: ContactSource::Corner { corner: ci, face },
                    });
                }
            }
        }
        out
    }

    /// Smallest signed distance over all point/solid pairs; infinite when
    /// the world has nothing to touch.
    pub fn min_gap(&self, pose: &Pose) -> f64 {
        self.contacts(pose, f64::INFINITY)
            .iter()
            .map(|c| c.gap)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn in_bounds(&self, pose: &Pose) -> bool {
        (0..3).all(|i| {
            let x = pose.position[i];
            x >= self.bounds.min[i] && x <= self.bounds.max[i]
        })
    }

    pub fn goal_pose(&self) -> Pose {
        self.goal.pose()
    }

    pub fn goal_position_error(&self, pose: &Pose) -> f64 {
        self.goal.position_error(pose)
    }

    pub fn goal_rotation_error(&self, orientation: &UnitQuaternion<f64>) -> f64 {
        self.goal.rotation_error(orientation)
    }

    pub fn in_goal(&self, pose: &Pose) -> bool {
        self.goal.contains(pose)
    }
}

impl Goal {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_pos > 0.0 && self.tol_rot > 0.0) {
            return Err(SimError::InvalidEnvironment("goal tolerances must be positive".into()));
        }
        self.pose.to_pose()?;
        if self.free_spin.is_some_and(|a| (a.norm() - 1.0).abs() > UNIT_TOL) {
            return Err(SimError::InvalidEnvironment("goal spin axis is not unit".into()));
        }
        Ok(())
    }

    /// The goal pose. Goals are checked when an environment or demo spec is
    /// validated, so a malformed quaternion here is a programming error.
    pub fn pose(&self) -> Pose {
        self.pose.to_pose().expect("validated goal pose")
    }

    /// Position error with free goal axes masked out.
    pub fn position_error(&self, pose: &Pose) -> f64 {
        let mut e = pose.position - self.pose.p;
        for i in 0..3 {
            if self.free_axes[i] {
                e[i] = 0.0;
            }
        }
        e.norm()
    }

    pub fn rotation_error(&self, orientation: &UnitQuaternion<f64>) -> f64 {
        let goal = self.pose().orientation;
        match self.free_spin {
            Some(axis) => (orientation * axis).angle(&(goal * axis)),
            None => angle_between(orientation, &goal),
        }
    }

    pub fn contains(&self, pose: &Pose) -> bool {
        self.position_error(pose) <= self.tol_pos && self.rotation_error(&pose.orientation) <= self.tol_rot
    }
}

fn deepest(it: impl Iterator<Item = (usize, f64)>) -> (usize, f64) {
    it.fold((usize::MAX, f64::NEG_INFINITY), |best, cur| {
        if cur.1 > best.1 {
            cur
        } else {
            best
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn floor_env() -> Environment {
        Environment {
            name: "floor".into(),
            facets: vec![Facet {
                p: Vector3::zeros(),
                n: Vector3::z(),
                mu: 0.3,
                solid: None,
            }],
            corners: vec![],
            body_faces: vec![],
            probes: vec![Vector3::zeros()],
            goal: Goal {
                pose: PoseSpec {
                    p: Vector3::zeros(),
                    q: identity_wxyz(),
                },
                tol_pos: 1e-3,
                tol_rot: 0.1,
                free_axes: [true, true, false],
                free_spin: None,
            },
            bounds: Bounds {
                min: Vector3::repeat(-1.0),
                max: Vector3::repeat(1.0),
            },
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let env = floor_env();
        let s = serde_json::to_string(&env).unwrap();
        assert_eq!(Environment::from_json_str(&s).unwrap(), env);
        let mut bad = env.clone();
        bad.facets[0].n = Vector3::new(0.0, 0.0, 2.0);
        assert!(bad.validate().is_err());
        let mut bad = env.clone();
        bad.goal.tol_pos = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn probe_gap_against_half_space() {
        let env = floor_env();
        let pose = Pose::new(Vector3::new(0.3, 0.0, 0.02), UnitQuaternion::identity());
        assert!(env.contacts(&pose, 0.01).is_empty());
        let c = env.contacts(&pose, 0.05);
        assert_eq!(c.len(), 1);
        assert!((c[0].gap - 0.02).abs() < 1e-15);
        assert!((env.min_gap(&pose) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn solid_uses_the_facet_of_least_penetration() {
        // block x >= 1, z <= 0 with its top and left facets
        let mut env = floor_env();
        env.facets = vec![
            Facet { p: Vector3::zeros(), n: Vector3::z(), mu: 0.0, solid: Some(7) },
            Facet { p: Vector3::new(1.0, 0.0, 0.0), n: -Vector3::x(), mu: 0.0, solid: Some(7) },
        ];
        let beside = Pose::new(Vector3::new(0.99, 0.0, -0.5), UnitQuaternion::identity());
        let c = env.contacts(&beside, 0.1);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].normal, -Vector3::x());
        assert!((c[0].gap - 0.01).abs() < 1e-12);
        assert_eq!(env.solids(), vec![vec![0, 1]]);
    }

    #[test]
    fn corner_against_rotated_body_face() {
        let mut env = floor_env();
        env.facets.clear();
        env.corners = vec![Corner { p: Vector3::new(0.0, 0.0, 0.0), mu: 0.2 }];
        // unit cube body centered on the reference point
        env.body_faces = (0..3)
            .flat_map(|i| {
                let e = Vector3::ith(i, 1.0);
                [BodyFace { p: e * 0.5, n: e }, BodyFace { p: -e * 0.5, n: -e }]
            })
            .collect();
        let q = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), 0.3);
        let pose = Pose::new(Vector3::new(0.0, 0.0, 0.5), q);
        let c = env.contacts(&pose, 0.1);
        assert_eq!(c.len(), 1);
        // corner sits on the rotated bottom face; force pushes the body along its own +z
        assert!((c[0].normal - q * Vector3::z()).norm() < 1e-12);
        assert!((c[0].gap - (0.5 * 0.3f64.cos() - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn goal_masks_free_axes() {
        let env = floor_env();
        let pose = Pose::new(Vector3::new(0.5, -0.2, 0.0005), UnitQuaternion::identity());
        assert!(env.in_goal(&pose));
        let tilted = Pose::new(pose.position, UnitQuaternion::from_euler_angles(0.2, 0.0, 0.0));
        assert!(!env.in_goal(&tilted));
    }

    #[test]
    fn free_spin_ignores_rotation_about_the_axis() {
        let mut goal = floor_env().goal;
        goal.free_spin = Some(Vector3::z());
        let spun = UnitQuaternion::from_euler_angles(0.0, 0.0, 1.0);
        assert!(goal.rotation_error(&spun) < 1e-12);
        let tilted = spun * UnitQuaternion::from_euler_angles(0.1, 0.0, 0.0);
        assert!((goal.rotation_error(&tilted) - 0.1).abs() < 1e-12);
        goal.free_spin = Some(Vector3::new(0.0, 0.0, 2.0));
        assert!(matches!(goal.validate(), Err(SimError::InvalidEnvironment(_))));
    }
}
