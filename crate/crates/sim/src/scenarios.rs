//! Bundled scenarios.
//!
//! Each scenario has an environment file under `scenarios/` plus functions
//! giving start poses and teachers. The files are generated from the
//! builders here, and a test keeps the two in sync.

use compliant_core::{LearnerConfig, Pose};
use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::env::{Bounds, BodyFace, Corner, Environment, Facet, Goal, PoseSpec};
use crate::error::{Result, SimError};
use crate::teacher::{DemoSpec, NoiseSpec, TeacherSpec};

pub const NAMES: [&str; 4] = ["valley", "peg2d", "edge", "couple"];

const VALLEY_JSON: &str = include_str!("../scenarios/valley.json");
const PEG2D_JSON: &str = include_str!("../scenarios/peg2d.json");
const EDGE_JSON: &str = include_str!("../scenarios/edge.json");
const COUPLE_JSON: &str = include_str!("../scenarios/couple.json");

/// Loads a bundled environment by name.
pub fn environment(name: &str) -> Result<Environment> {
    let text = match name {
        "valley" => VALLEY_JSON,
        "peg2d" => PEG2D_JSON,
        "edge" => EDGE_JSON,
        "couple" => COUPLE_JSON,
        other => return Err(SimError::UnknownScenario(other.to_string())),
    };
    Environment::from_json_str(text)
}

/// Builds the default environment of a bundled scenario from code.
pub fn build(name: &str) -> Result<Environment> {
    match name {
        "valley" => Ok(valley(VALLEY_MU)),
        "peg2d" => Ok(peg2d(&PegGeometry::default())),
        "edge" => Ok(edge()),
        "couple" => Ok(couple()),
        other => Err(SimError::UnknownScenario(other.to_string())),
    }
}

/// Learner settings used with a scenario. Every bundled scenario uses the
/// defaults.
pub fn learner_config(_name: &str) -> LearnerConfig {
    LearnerConfig::default()
}

fn pose_spec(p: Vector3<f64>, q: UnitQuaternion<f64>) -> PoseSpec {
    PoseSpec::from(&Pose::new(p, q))
}

fn facet(p: Vector3<f64>, n: Vector3<f64>, mu: f64, solid: Option<usize>) -> Facet {
    Facet { p, n: n.normalize(), mu, solid }
}

fn bounds(min: [f64; 3], max: [f64; 3]) -> Bounds {
    Bounds { min: Vector3::from(min), max: Vector3::from(max) }
}

// ---------------------------------------------------------------- valley

pub const VALLEY_MU: f64 = 0.65;

/// Two 45 degree planes meeting along the y axis; a point tool slides down
/// either face.
pub fn valley(mu: f64) -> Environment {
    Environment {
        name: "valley".into(),
        facets: vec![
            facet(Vector3::zeros(), Vector3::new(1.0, 0.0, 1.0), mu, None),
            facet(Vector3::zeros(), Vector3::new(-1.0, 0.0, 1.0), mu, None),
        ],
        corners: vec![],
        body_faces: vec![],
        probes: vec![Vector3::zeros()],
        goal: Goal {
            pose: pose_spec(Vector3::zeros(), UnitQuaternion::identity()),
            tol_pos: 1e-3,
            tol_rot: std::f64::consts::PI,
            free_axes: [false, true, false],
            free_spin: None,
        },
        bounds: bounds([-0.2, -0.2, -0.05], [0.2, 0.2, 0.3]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::str::FromStr for Side {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            _ => Err(SimError::InvalidParameter(format!("side must be left or right, got '{s}'"))),
        }
    }
}

/// Point on a valley face `height` above the bottom line.
pub fn valley_start(side: Side, height: f64, y: f64) -> Pose {
    let x = match side {
        Side::Left => -height,
        Side::Right => height,
    };
    Pose::new(Vector3::new(x, y, height), UnitQuaternion::identity())
}

pub fn valley_demo(side: Side, noise_deg: f64) -> DemoSpec {
    DemoSpec {
        start: PoseSpec::from(&valley_start(side, 0.03, 0.0)),
        teacher: TeacherSpec { force: Vector3::new(0.0, 0.0, -5.0), ..Default::default() },
        noise: NoiseSpec {
            direction_deg: noise_deg,
            correlation_time: 0.2,
            ..Default::default()
        },
        duration: 20.0,
        rate: 100.0,
        goal: None,
    }
}

// ---------------------------------------------------------------- peg2d

/// Cross-section of a peg and a chamfered hole, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PegGeometry {
    pub radius: f64,
    pub clearance: f64,
    pub length: f64,
    pub depth: f64,
    pub mu: f64,
    /// Width and depth of the 45 degree chamfer around the hole mouth.
    pub chamfer: f64,
    /// Tip depth from which the peg counts as inserted.
    pub min_insert: f64,
    /// Largest tilt counted as inserted, degrees.
    pub max_tilt_deg: f64,
    /// Tip depth at which the teacher stops.
    pub demo_depth: f64,
}

impl Default for PegGeometry {
    fn default() -> Self {
        PegGeometry {
            radius: 0.0165,
            clearance: 0.00025,
            length: 0.08,
            depth: 0.04,
            mu: 0.3,
            chamfer: 0.002,
            min_insert: 0.01,
            max_tilt_deg: 1.5,
            demo_depth: 0.03,
        }
    }
}

impl PegGeometry {
    pub fn hole_half_width(&self) -> f64 {
        self.radius + self.clearance
    }
}

/// Peg in the xz plane over a hole centered on the origin whose top surface
/// is z = 0. The reference point (the simulated wrist sensor) is the center
/// of the top face, so the tip center sits at `-length` along body z.
pub fn peg2d(g: &PegGeometry) -> Environment {
    let big = g.hole_half_width();
    let (r, mu, l, ch) = (g.radius, g.mu, g.length, g.chamfer);
    let half_thick = 0.02;
    let bevel = |side: f64| facet(Vector3::new(side * big, 0.0, -ch), Vector3::new(-side, 0.0, 1.0), mu, None);
    let mut left = bevel(-1.0);
    left.solid = Some(0);
    let mut right = bevel(1.0);
    right.solid = Some(1);
    Environment {
        name: "peg2d".into(),
        facets: vec![
            facet(Vector3::new(-big, 0.0, 0.0), Vector3::z(), mu, Some(0)),
            facet(Vector3::new(-big, 0.0, 0.0), Vector3::x(), mu, Some(0)),
            left,
            facet(Vector3::new(big, 0.0, 0.0), Vector3::z(), mu, Some(1)),
            facet(Vector3::new(big, 0.0, 0.0), -Vector3::x(), mu, Some(1)),
            right,
            facet(Vector3::new(0.0, 0.0, -g.depth), Vector3::z(), mu, Some(2)),
        ],
        corners: vec![
            Corner { p: Vector3::new(-big - ch, 0.0, 0.0), mu },
            Corner { p: Vector3::new(-big, 0.0, -ch), mu },
            Corner { p: Vector3::new(big + ch, 0.0, 0.0), mu },
            Corner { p: Vector3::new(big, 0.0, -ch), mu },
        ],
        body_faces: vec![
            BodyFace { p: Vector3::new(-r, 0.0, 0.0), n: -Vector3::x() },
            BodyFace { p: Vector3::new(r, 0.0, 0.0), n: Vector3::x() },
            BodyFace { p: Vector3::new(0.0, 0.0, -l), n: -Vector3::z() },
            BodyFace { p: Vector3::zeros(), n: Vector3::z() },
            BodyFace { p: Vector3::new(0.0, half_thick, 0.0), n: Vector3::y() },
            BodyFace { p: Vector3::new(0.0, -half_thick, 0.0), n: -Vector3::y() },
        ],
        probes: vec![Vector3::new(-r, 0.0, -l), Vector3::new(r, 0.0, -l)],
        // any tip depth between min_insert and the hole bottom
        goal: Goal {
            pose: pose_spec(Vector3::new(0.0, 0.0, l - 0.5 * (g.min_insert + g.depth)), UnitQuaternion::identity()),
            tol_pos: 0.5 * (g.depth - g.min_insert),
            tol_rot: g.max_tilt_deg.to_radians(),
            free_axes: [true, true, false],
            free_spin: Some(Vector3::z()),
        },
        bounds: bounds([-0.2, -0.1, -g.depth - 0.01], [0.2, 0.1, 0.3]),
    }
}

/// Peg leaning toward -x by `angle_deg` with its lower tip corner resting
/// on the left chamfer, `dip` below the surface.
pub fn peg_start(g: &PegGeometry, angle_deg: f64, dip: f64) -> Pose {
    let a = angle_deg.to_radians();
    let q = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), -a);
    let corner = Vector3::new(-g.hole_half_width() - g.chamfer + dip + 1e-7, 0.0, -dip);
    let top = corner - q * Vector3::new(-g.radius, 0.0, -g.length);
    Pose::new(top, q)
}

/// Start depth of the peg tip corner on the chamfer.
pub const PEG_DIP: f64 = 0.001;

pub fn peg_demo(g: &PegGeometry, angle_deg: f64, noise: NoiseSpec) -> DemoSpec {
    DemoSpec {
        start: PoseSpec::from(&peg_start(g, angle_deg, PEG_DIP)),
        teacher: TeacherSpec {
            force: Vector3::new(-0.6, 0.0, -3.0),
            righting_gain: 5.0,
            ..Default::default()
        },
        noise,
        duration: 20.0,
        rate: 200.0,
        goal: Some(Goal {
            pose: pose_spec(Vector3::new(0.0, 0.0, g.length - g.demo_depth), UnitQuaternion::identity()),
            tol_pos: 0.005,
            tol_rot: 3f64.to_radians(),
            free_axes: [true, true, false],
            free_spin: Some(Vector3::z()),
        }),
    }
}

/// Noise used for the peg demonstrations in the acceptance runs.
pub fn peg_noise() -> NoiseSpec {
    NoiseSpec {
        direction_deg: 2.0,
        torque_std: 0.25,
        sensor_force_std: 0.0,
        sensor_torque_std: 0.0,
        correlation_time: 0.05,
    }
}

// ---------------------------------------------------------------- edge

pub const EDGE_LENGTH: f64 = 0.1;

/// Floor z <= 0 meeting a wall x <= 0. A rod of length `EDGE_LENGTH` is
/// held at its top; its tip is the only probe.
pub fn edge() -> Environment {
    Environment {
        name: "edge".into(),
        facets: vec![
            facet(Vector3::zeros(), Vector3::z(), 0.5, None),
            facet(Vector3::zeros(), Vector3::x(), 0.5, None),
        ],
        corners: vec![],
        body_faces: vec![],
        probes: vec![Vector3::new(0.0, 0.0, -EDGE_LENGTH)],
        goal: Goal {
            pose: pose_spec(Vector3::new(0.0, 0.0, EDGE_LENGTH), UnitQuaternion::identity()),
            tol_pos: 1.0,
            tol_rot: 2f64.to_radians(),
            free_axes: [true, true, true],
            free_spin: Some(Vector3::z()),
        },
        bounds: bounds([-0.2, -0.2, -0.05], [0.3, 0.2, 0.3]),
    }
}

/// Rod tilted by `angle_deg` toward +x with its tip in the corner.
pub fn edge_start(angle_deg: f64) -> Pose {
    let q = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), angle_deg.to_radians());
    Pose::new(q * Vector3::new(0.0, 0.0, EDGE_LENGTH), q)
}

/// The teacher only turns the rod upright while pressing it along its own
/// axis into the corner; the corner makes the top translate.
pub fn edge_demo(noise: NoiseSpec) -> DemoSpec {
    DemoSpec {
        start: PoseSpec::from(&edge_start(30.0)),
        teacher: TeacherSpec {
            force_body: Vector3::new(0.0, 0.0, -5.0),
            torque: Vector3::new(0.0, -1.0, 0.0),
            ..Default::default()
        },
        noise,
        duration: 20.0,
        rate: 100.0,
        goal: None,
    }
}

// ---------------------------------------------------------------- couple

/// Half-width of the funnel throat.
pub const COUPLE_THROAT: f64 = 0.02;
/// Rim radius of the coupler.
pub const COUPLE_RIM: f64 = 0.03;
/// Funnel wall slope above horizontal, degrees.
pub const COUPLE_WALL_DEG: f64 = 20.0;

/// Height of the rim center when it sits level in the funnel.
pub fn couple_seat() -> f64 {
    (COUPLE_RIM - COUPLE_THROAT) * COUPLE_WALL_DEG.to_radians().tan()
}

/// Shallow square funnel. A rim with four probes seats where the walls are
/// `COUPLE_RIM` apart. The walls grip hard enough that a tilted rim pivots
/// on its lowest probe instead of sliding.
pub fn couple() -> Environment {
    let a = COUPLE_THROAT;
    let mu = 0.5;
    let (s, c) = COUPLE_WALL_DEG.to_radians().sin_cos();
    Environment {
        name: "couple".into(),
        facets: vec![
            facet(Vector3::new(a, 0.0, 0.0), Vector3::new(-s, 0.0, c), mu, None),
            facet(Vector3::new(-a, 0.0, 0.0), Vector3::new(s, 0.0, c), mu, None),
            facet(Vector3::new(0.0, a, 0.0), Vector3::new(0.0, -s, c), mu, None),
            facet(Vector3::new(0.0, -a, 0.0), Vector3::new(0.0, s, c), mu, None),
        ],
        corners: vec![],
        body_faces: vec![],
        probes: vec![
            Vector3::new(COUPLE_RIM, 0.0, 0.0),
            Vector3::new(-COUPLE_RIM, 0.0, 0.0),
            Vector3::new(0.0, COUPLE_RIM, 0.0),
            Vector3::new(0.0, -COUPLE_RIM, 0.0),
        ],
        goal: Goal {
            pose: pose_spec(Vector3::new(0.0, 0.0, couple_seat()), UnitQuaternion::identity()),
            tol_pos: 1e-3,
            tol_rot: 2f64.to_radians(),
            free_axes: [false; 3],
            free_spin: None,
        },
        bounds: bounds([-0.2, -0.2, -0.05], [0.2, 0.2, 0.3]),
    }
}

/// Rim tilted about x by `angle_deg`, centered above the seat.
pub fn couple_start(angle_deg: f64) -> Pose {
    Pose::new(
        Vector3::new(0.0, 0.0, couple_seat() + 0.02),
        UnitQuaternion::from_axis_angle(&Vector3::x_axis(), angle_deg.to_radians()),
    )
}

/// The teacher only presses down; the funnel turns the rim level.
pub fn couple_demo(angle_deg: f64, noise: NoiseSpec) -> DemoSpec {
    DemoSpec {
        start: PoseSpec::from(&couple_start(angle_deg)),
        teacher: TeacherSpec {
            force: Vector3::new(0.0, 0.0, -5.0),
            ..Default::default()
        },
        noise,
        duration: 20.0,
        rate: 100.0,
        goal: None,
    }
}

/// Default demonstration set of a scenario, as (id, spec) pairs.
pub fn default_demos(name: &str, noise: NoiseSpec) -> Result<Vec<(String, DemoSpec)>> {
    let g = PegGeometry::default();
    Ok(match name {
        "valley" => vec![
            ("valley-left".into(), valley_demo(Side::Left, noise.direction_deg)),
            ("valley-right".into(), valley_demo(Side::Right, noise.direction_deg)),
        ],
        "peg2d" => vec![("peg-20".into(), peg_demo(&g, 20.0, noise))],
        "edge" => vec![("edge".into(), edge_demo(noise))],
        "couple" => vec![
            ("couple-pos".into(), couple_demo(10.0, noise)),
            ("couple-neg".into(), couple_demo(-10.0, noise)),
        ],
        other => return Err(SimError::UnknownScenario(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Set `UPDATE_SCENARIOS=1` to rewrite the bundled files from the builders.
    #[test]
    fn bundled_files_match_builders() {
        for name in NAMES {
            let built = build(name).unwrap();
            if std::env::var_os("UPDATE_SCENARIOS").is_some() {
                let path = format!("{}/scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"));
                std::fs::write(path, serde_json::to_string_pretty(&built).unwrap() + "\n").unwrap();
                continue;
            }
            assert_eq!(environment(name).unwrap(), built, "{name}");
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(environment("nope"), Err(SimError::UnknownScenario(_))));
    }

    #[test]
    fn starts_are_contact_free_or_touching() {
        let g = PegGeometry::default();
        let peg = build("peg2d").unwrap();
        for a in [5.0, 20.0, 35.0] {
            let gap = peg.min_gap(&peg_start(&g, a, 0.002));
            assert!((0.0..1e-6).contains(&gap), "{a}: {gap}");
        }
        let valley = build("valley").unwrap();
        assert!(valley.min_gap(&valley_start(Side::Left, 0.03, 0.0)).abs() < 1e-12);
        let edge = build("edge").unwrap();
        assert!(edge.min_gap(&edge_start(30.0)).abs() < 1e-12);
        let couple = build("couple").unwrap();
        assert!(couple.min_gap(&couple_start(10.0)) > 0.0);
    }
}
