//! Domain types shared by every learning stage.

use nalgebra::{Matrix3, Quaternion, SymmetricEigen, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which half of the 6-D motion a computation concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Translation,
    Rotation,
}

impl Channel {
    pub const BOTH: [Channel; 2] = [Channel::Translation, Channel::Rotation];
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Channel::Translation => f.write_str("translation"),
            Channel::Rotation => f.write_str("rotation"),
        }
    }
}

/// Position in meters and orientation as a unit quaternion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

impl Pose {
    pub fn new(position: Vector3<f64>, orientation: UnitQuaternion<f64>) -> Self {
        Pose {
            position,
            orientation,
        }
    }

    pub fn identity() -> Self {
        Pose::new(Vector3::zeros(), UnitQuaternion::identity())
    }

    /// Builds a pose from a `[w, x, y, z]` quaternion. Quaternions off unit
    /// norm by more than 1e-6 are rejected; smaller drift is renormalized.
    pub fn from_wxyz(position: [f64; 3], q: [f64; 4]) -> Result<Self> {
        let quat = Quaternion::new(q[0], q[1], q[2], q[3]);
        let norm = quat.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-6 {
            return Err(Error::NonUnitQuaternion { norm });
        }
        Ok(Pose::new(
            Vector3::from(position),
            UnitQuaternion::from_quaternion(quat),
        ))
    }

    pub fn wxyz(&self) -> [f64; 4] {
        let q = self.orientation.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|v| v.is_finite())
            && self.orientation.coords.iter().all(|v| v.is_finite())
    }
}

/// One synchronized pose + wrench reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrenchSample {
    pub t: f64,
    pub pose: Pose,
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl WrenchSample {
    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.pose.is_finite()
            && self.force.iter().all(|v| v.is_finite())
            && self.torque.iter().all(|v| v.is_finite())
    }
}

/// Coordinate frame the recorded wrench is expressed in.
///
/// Poses are always world poses of the sensor origin. `World` wrenches are in
/// world axes, `Tool` wrenches in the sensor's own axes. Torques are taken
/// about the sensor origin in both cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    #[default]
    World,
    Tool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Demonstration {
    pub id: String,
    pub frame: Frame,
    pub samples: Vec<WrenchSample>,
}

/// Checks sample count, finiteness and strictly increasing timestamps.
/// Errors name the first offending sample.
pub fn validate_demonstration(demo: &Demonstration) -> Result<()> {
    if demo.samples.len() < 2 {
        return Err(Error::EmptyDemo {
            index: demo.samples.len(),
        });
    }
    let mut prev_t = f64::NEG_INFINITY;
    for (index, s) in demo.samples.iter().enumerate() {
        if !s.is_finite() {
            return Err(Error::NonFiniteValue { index });
        }
        if s.t <= prev_t {
            return Err(Error::NonMonotoneTime { index });
        }
        prev_t = s.t;
    }
    Ok(())
}

/// Windowed increment of a demonstration.
///
/// Translation quantities are in world axes; `dbeta` is the body-frame
/// rotation increment and `t_raw` the torque in body axes, so that
/// `t_raw · dbeta` is frame-independent work.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionStep {
    pub dx: Vector3<f64>,
    pub dbeta: Vector3<f64>,
    pub v_hat: Option<Vector3<f64>>,
    pub w_hat: Option<Vector3<f64>>,
    pub f_hat: Option<Vector3<f64>>,
    pub t_hat: Option<Vector3<f64>>,
    pub f_raw: Vector3<f64>,
    pub t_raw: Vector3<f64>,
}

impl MotionStep {
    pub fn motion(&self, channel: Channel) -> Vector3<f64> {
        match channel {
            Channel::Translation => self.dx,
            Channel::Rotation => self.dbeta,
        }
    }

    pub fn wrench(&self, channel: Channel) -> Vector3<f64> {
        match channel {
            Channel::Translation => self.f_raw,
            Channel::Rotation => self.t_raw,
        }
    }

    pub fn motion_dir(&self, channel: Channel) -> Option<Vector3<f64>> {
        match channel {
            Channel::Translation => self.v_hat,
            Channel::Rotation => self.w_hat,
        }
    }

    pub fn wrench_dir(&self, channel: Channel) -> Option<Vector3<f64>> {
        match channel {
            Channel::Translation => self.f_hat,
            Channel::Rotation => self.t_hat,
        }
    }
}

fn default_eta() -> f64 {
    20.0
}
fn default_xi() -> f64 {
    10.0
}
fn default_window() -> usize {
    20
}
fn default_sigma_work() -> f64 {
    0.7
}
fn default_zeta() -> f64 {
    0.6
}
fn default_grid_res() -> f64 {
    0.01
}
fn default_floor_trans() -> f64 {
    1e-4
}
fn default_floor_rot() -> f64 {
    1e-3
}
fn default_floor_force() -> f64 {
    0.2
}
fn default_floor_torque() -> f64 {
    0.01
}
fn default_sigma_demo() -> f64 {
    0.1
}
fn default_k_trans() -> f64 {
    500.0
}
fn default_k_rot() -> f64 {
    50.0
}
fn default_nu() -> f64 {
    0.02
}
fn default_lambda() -> f64 {
    0.2
}

/// Learner parameters. Every field can be overridden from a JSON file;
/// missing fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    /// Perpendicular sector expansion, degrees.
    #[serde(default = "default_eta")]
    pub eta_deg: f64,
    /// Sector widening, degrees.
    #[serde(default = "default_xi")]
    pub xi_deg: f64,
    /// Samples per averaging window.
    #[serde(default = "default_window")]
    pub window: usize,
    /// Work-ratio threshold for 3-DOF compliance.
    #[serde(default = "default_sigma_work")]
    pub sigma_work: f64,
    /// Inlier-ratio threshold for accepting a desired direction.
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    /// Vote grid cell size, radians.
    #[serde(default = "default_grid_res")]
    pub grid_res: f64,
    #[serde(default = "default_floor_trans")]
    pub motion_floor_trans: f64,
    #[serde(default = "default_floor_rot")]
    pub motion_floor_rot: f64,
    #[serde(default = "default_floor_force")]
    pub wrench_floor_force: f64,
    #[serde(default = "default_floor_torque")]
    pub wrench_floor_torque: f64,
    /// Std of per-demonstration mean directions, used by the axis selection.
    #[serde(default = "default_sigma_demo")]
    pub sigma_demo: f64,
    /// Stiff-axis value for translation, N/m.
    #[serde(default = "default_k_trans")]
    pub stiffness_trans: f64,
    /// Stiff-axis value for rotation, N·m/rad.
    #[serde(default = "default_k_rot")]
    pub stiffness_rot: f64,
    /// Upper bound on execution speed, m/s.
    #[serde(default = "default_nu")]
    pub speed_nu: f64,
    /// Upper bound on rotational execution speed, rad/s.
    #[serde(default = "default_lambda")]
    pub speed_lambda: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            eta_deg: default_eta(),
            xi_deg: default_xi(),
            window: default_window(),
            sigma_work: default_sigma_work(),
            zeta: default_zeta(),
            grid_res: default_grid_res(),
            motion_floor_trans: default_floor_trans(),
            motion_floor_rot: default_floor_rot(),
            wrench_floor_force: default_floor_force(),
            wrench_floor_torque: default_floor_torque(),
            sigma_demo: default_sigma_demo(),
            stiffness_trans: default_k_trans(),
            stiffness_rot: default_k_rot(),
            speed_nu: default_nu(),
            speed_lambda: default_lambda(),
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.eta_deg > 0.0 && self.eta_deg < 90.0) {
            return bad("eta_deg must lie in (0, 90)");
        }
        if !(self.xi_deg > 0.0 && self.xi_deg < 90.0) {
            return bad("xi_deg must lie in (0, 90)");
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return bad("zeta must lie in (0, 1]");
        }
        if !(self.sigma_work > 0.0 && self.sigma_work <= 1.0) {
            return bad("sigma_work must lie in (0, 1]");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        let positive = [
            ("grid_res", self.grid_res),
            ("motion_floor_trans", self.motion_floor_trans),
            ("motion_floor_rot", self.motion_floor_rot),
            ("wrench_floor_force", self.wrench_floor_force),
            ("wrench_floor_torque", self.wrench_floor_torque),
            ("sigma_demo", self.sigma_demo),
            ("stiffness_trans", self.stiffness_trans),
            ("stiffness_rot", self.stiffness_rot),
            ("speed_nu", self.speed_nu),
            ("speed_lambda", self.speed_lambda),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn motion_floor(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Translation => self.motion_floor_trans,
            Channel::Rotation => self.motion_floor_rot,
        }
    }

    pub fn wrench_floor(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Translation => self.wrench_floor_force,
            Channel::Rotation => self.wrench_floor_torque,
        }
    }

    pub fn stiffness(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Translation => self.stiffness_trans,
            Channel::Rotation => self.stiffness_rot,
        }
    }
}

/// A learned linear compliant motion: desired directions, stiffness
/// matrices restricted to {0, k} spectra, and execution speeds.
///
/// Deserializing does not run [`CompliantPrimitive::check`]; loaders should.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompliantPrimitive {
    pub v_d: Option<Vector3<f64>>,
    pub w_d: Option<Vector3<f64>>,
    pub k_f: Matrix3<f64>,
    pub k_o: Matrix3<f64>,
    pub pitch: Option<f64>,
    pub nu: f64,
    pub lambda: f64,
    pub trans_3dof_compliant: bool,
    pub rot_3dof_compliant: bool,
}

const UNIT_TOL: f64 = 1e-9;
const SPECTRUM_TOL: f64 = 1e-6;

impl CompliantPrimitive {
    /// Builds a primitive and checks every structural invariant.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        v_d: Option<Vector3<f64>>,
        w_d: Option<Vector3<f64>>,
        k_f: Matrix3<f64>,
        k_o: Matrix3<f64>,
        pitch: Option<f64>,
        nu: f64,
        lambda: f64,
        trans_3dof_compliant: bool,
        rot_3dof_compliant: bool,
    ) -> Result<Self> {
        let p = CompliantPrimitive {
            v_d,
            w_d,
            k_f,
            k_o,
            pitch,
            nu,
            lambda,
            trans_3dof_compliant,
            rot_3dof_compliant,
        };
        p.check()?;
        Ok(p)
    }

    pub fn desired(&self, channel: Channel) -> Option<Vector3<f64>> {
        match channel {
            Channel::Translation => self.v_d,
            Channel::Rotation => self.w_d,
        }
    }

    pub fn stiffness(&self, channel: Channel) -> &Matrix3<f64> {
        match channel {
            Channel::Translation => &self.k_f,
            Channel::Rotation => &self.k_o,
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPrimitive(m));
        for (name, dir) in [("v_d", self.v_d), ("w_d", self.w_d)] {
            if let Some(d) = dir {
                if (d.norm() - 1.0).abs() > UNIT_TOL {
                    return bad(format!("{name} is not unit"));
                }
            }
        }
        for (name, k, dir) in [("K_f", &self.k_f, self.v_d), ("K_o", &self.k_o, self.w_d)] {
            if !k.iter().all(|v| v.is_finite()) {
                return bad(format!("{name} has non-finite entries"));
            }
            if (k - k.transpose()).abs().max() > SPECTRUM_TOL * k.abs().max().max(1.0) {
                return bad(format!("{name} is not symmetric"));
            }
            let eig = SymmetricEigen::new(*k);
            let stiff = eig.eigenvalues.abs().max();
            for (i, &ev) in eig.eigenvalues.iter().enumerate() {
                let is_zero = ev.abs() <= SPECTRUM_TOL * stiff.max(1.0);
                let is_stiff = (ev - stiff).abs() <= SPECTRUM_TOL * stiff;
                if !is_zero && !is_stiff {
                    return bad(format!("{name} eigenvalue {ev} not in {{0, {stiff}}}"));
                }
                if is_zero {
                    if let Some(d) = dir {
                        let axis = eig.eigenvectors.column(i);
                        if axis.dot(&d).abs() > SPECTRUM_TOL {
                            return bad(format!("{name} compliant axis not orthogonal to direction"));
                        }
                    }
                }
            }
        }
        match (self.v_d, self.w_d, self.pitch) {
            (Some(_), Some(_), Some(pitch)) => {
                let expect = pitch * self.lambda;
                if (self.nu - expect).abs() > 1e-9 * self.nu.abs().max(expect.abs()).max(1e-300) {
                    return bad("nu != pitch * lambda".to_string());
                }
            }
            (Some(_), Some(_), None) => return bad("pitch missing with both directions".into()),
            (_, _, Some(_)) => return bad("pitch present without both directions".into()),
            _ => {}
        }
        if self.trans_3dof_compliant && (self.v_d.is_some() || self.k_f.abs().max() != 0.0) {
            return bad("3-DOF compliant translation must have K_f = 0 and no v_d".into());
        }
        if self.rot_3dof_compliant && (self.w_d.is_some() || self.k_o.abs().max() != 0.0) {
            return bad("3-DOF compliant rotation must have K_o = 0 and no w_d".into());
        }
        if !(self.nu.is_finite() && self.lambda.is_finite() && self.nu >= 0.0 && self.lambda >= 0.0)
        {
            return bad("speeds must be finite and non-negative".into());
        }
        Ok(())
    }
}

/// Execution speeds for a primitive. When both directions exist the pair is
/// the largest `(nu, lambda) ∝ (d_x, d_beta)` within the configured caps, so
/// `nu = pitch · lambda` holds exactly and a channel that barely moved during
/// the demonstrations runs at a correspondingly negligible speed.
pub fn execution_speeds(
    has_v: bool,
    has_w: bool,
    pitch_parts: Option<(f64, f64)>,
    cfg: &LearnerConfig,
) -> (f64, f64) {
    match (has_v, has_w, pitch_parts) {
        (true, true, Some((dx, dbeta))) => {
            let pitch = dx / dbeta;
            let lambda = if dx > 0.0 {
                (cfg.speed_nu / dx).min(cfg.speed_lambda / dbeta) * dbeta
            } else {
                cfg.speed_lambda
            };
            (pitch * lambda, lambda)
        }
        (true, false, _) => (cfg.speed_nu, 0.0),
        (false, true, _) => (0.0, cfg.speed_lambda),
        _ => (0.0, 0.0),
    }
}
