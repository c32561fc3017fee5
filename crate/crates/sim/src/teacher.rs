//! Synthetic kinesthetic teacher.

use compliant_core::so3::rotation_exp;
use compliant_core::types::validate_demonstration;
use compliant_core::{Demonstration, Frame, Pose, WrenchSample};
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::contact::{advance, BodyState, SimParams, Wrench};
use crate::env::{Environment, Goal, PoseSpec};
use crate::error::{Result, SimError};

/// What the teacher pushes with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TeacherSpec {
    /// Force in world axes, N.
    #[serde(default)]
    pub force: Vector3<f64>,
    /// Force along body axes, N (rotates with the body).
    #[serde(default)]
    pub force_body: Vector3<f64>,
    /// Torque in world axes, N m.
    #[serde(default)]
    pub torque: Vector3<f64>,
    /// Torque per radian of remaining rotation toward the goal orientation.
    #[serde(default)]
    pub righting_gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct NoiseSpec {
    /// Standard deviation of the wrench direction perturbation, degrees.
    #[serde(default)]
    pub direction_deg: f64,
    /// Standard deviation of an additive torque, N m per axis.
    #[serde(default)]
    pub torque_std: f64,
    #[serde(default)]
    pub sensor_force_std: f64,
    #[serde(default)]
    pub sensor_torque_std: f64,
    /// Correlation time of the teacher perturbations, s. Zero means
    /// independent per step.
    #[serde(default)]
    pub correlation_time: f64,
}

impl NoiseSpec {
    pub fn is_zero(&self) -> bool {
        self.direction_deg == 0.0
            && self.torque_std == 0.0
            && self.sensor_force_std == 0.0
            && self.sensor_torque_std == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoSpec {
    pub start: PoseSpec,
    pub teacher: TeacherSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    /// Longest recording, s.
    pub duration: f64,
    /// Recording rate, Hz.
    pub rate: f64,
    /// Where the teacher stops, when it differs from the environment goal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<Goal>,
}

/// Seconds without progress before the teacher gives up.
pub const STUCK_AFTER: f64 = 1.0;
const STUCK_POS: f64 = 1e-4;
const STUCK_ROT: f64 = 1e-3;

/// Three-axis Ornstein-Uhlenbeck process with unit stationary variance.
struct Ou {
    x: Vector3<f64>,
    a: f64,
}

impl Ou {
    fn new(rng: &mut ChaCha8Rng, tau: f64, dt: f64) -> Self {
        let a = if tau > 0.0 { (-dt / tau).exp() } else { 0.0 };
        Ou { x: normal3(rng), a }
    }

    fn next(&mut self, rng: &mut ChaCha8Rng) -> Vector3<f64> {
        let x = self.x;
        self.x = self.x * self.a + normal3(rng) * (1.0 - self.a * self.a).sqrt();
        x
    }
}

fn normal3(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    Vector3::from_fn(|_, _| StandardNormal.sample(rng))
}

/// Intended wrench before noise.
pub fn teacher_wrench(env: &Environment, teacher: &TeacherSpec, pose: &Pose) -> Wrench {
    let force = teacher.force + pose.orientation * teacher.force_body;
    let mut torque = teacher.torque;
    if teacher.righting_gain != 0.0 {
        let to_goal = (env.goal_pose().orientation * pose.orientation.inverse()).scaled_axis();
        torque += to_goal * teacher.righting_gain;
    }
    Wrench::new(force, torque)
}

/// Simulates a teacher moving the body from `spec.start`. Recording stops
/// when the teacher's goal (by default the environment goal) is reached or
/// the duration runs out; the sensor reading is the contact wrench, in
/// world axes.
pub fn generate_demo(
    env: &Environment,
    spec: &DemoSpec,
    params: &SimParams,
    seed: u64,
    id: &str,
) -> Result<Demonstration> {
    if !(spec.rate > 0.0) || !(spec.duration > 0.0) {
        return Err(SimError::InvalidParameter("rate and duration must be positive".into()));
    }
    let goal = spec.goal.as_ref().unwrap_or(&env.goal);
    goal.validate()?;
    let dt = params.dt;
    let every = ((1.0 / (spec.rate * dt)).round() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = spec.noise;
    let mut dir_noise = Ou::new(&mut rng, noise.correlation_time, dt);
    let mut torque_noise = Ou::new(&mut rng, noise.correlation_time, dt);
    let dir_std = noise.direction_deg.to_radians();

    let mut state = BodyState::new(spec.start.to_pose()?);
    let mut samples = Vec::new();
    let mut anchor = (state.pose, 0.0);
    let n_steps = (spec.duration / dt).ceil() as usize;
    for step in 0..=n_steps {
        let t = step as f64 * dt;
        let intent = teacher_wrench(env, &spec.teacher, &state.pose);
        let tilt = rotation_exp(&(dir_noise.next(&mut rng) * dir_std));
        let applied = Wrench::new(
            tilt * intent.force,
            tilt * intent.torque + torque_noise.next(&mut rng) * noise.torque_std,
        );
        let done = goal.contains(&state.pose) || step == n_steps;
        let (next, sol) = advance(env, &state, &applied, params);
        if step % every == 0 || done {
            samples.push(WrenchSample {
                t,
                pose: state.pose,
                force: sol.wrench.force + normal3(&mut rng) * noise.sensor_force_std,
                torque: sol.wrench.torque + normal3(&mut rng) * noise.sensor_torque_std,
            });
        }
        if done {
            break;
        }
        if !env.in_bounds(&next.pose) {
            return Err(SimError::Diverged { step });
        }
        state = next;
        let moved = (state.pose.position - anchor.0.position).norm() > STUCK_POS
            || state.pose.orientation.angle_to(&anchor.0.orientation) > STUCK_ROT;
        if moved {
            anchor = (state.pose, t);
        } else if t - anchor.1 > STUCK_AFTER {
            return Err(SimError::TeacherStuck { t, seconds: STUCK_AFTER });
        }
    }
    let demo = Demonstration {
        id: id.to_string(),
        frame: Frame::World,
        samples,
    };
    validate_demonstration(&demo)?;
    Ok(demo)
}
