//! Impedance control of the simulated body and primitive reproduction.

use std::io::Write;

use compliant_core::so3::rotation_exp;
use compliant_core::{CompliantPrimitive, Pose};

use crate::contact::{advance, BodyState, SimParams, Wrench};
use crate::env::Environment;
use crate::error::{Result, SimError};

/// Moves the target along the desired directions for one step. The
/// rotational direction is in body axes, so it right-multiplies.
pub fn advance_target(primitive: &CompliantPrimitive, target: &Pose, dt: f64) -> Pose {
    let mut next = *target;
    if let Some(v) = primitive.v_d {
        next.position += v * (primitive.nu * dt);
    }
    if let Some(w) = primitive.w_d {
        next.orientation *= rotation_exp(&(w * (primitive.lambda * dt)));
    }
    next
}

/// Spring wrench toward the target, in world axes about the reference point.
pub fn commanded_wrench(primitive: &CompliantPrimitive, pose: &Pose, target: &Pose) -> Wrench {
    let force = primitive.k_f * (target.position - pose.position);
    let err = (pose.orientation.inverse() * target.orientation).scaled_axis();
    let torque = pose.orientation * (primitive.k_o * err);
    Wrench::new(force, torque)
}

/// One control step. Damping lives in the quasi-static mobility, so the
/// resulting velocity is the commanded plus contact wrench over `D`.
/// Returns the new state, the new target and the sensor reading.
pub fn step_controller(
    env: &Environment,
    state: &BodyState,
    primitive: &CompliantPrimitive,
    target: &Pose,
    params: &SimParams,
) -> Result<(BodyState, Pose, Wrench)> {
    if !(params.dt > 0.0) {
        return Err(SimError::InvalidParameter("dt must be positive".into()));
    }
    let target = advance_target(primitive, target, params.dt);
    let cmd = commanded_wrench(primitive, &state.pose, &target);
    let (next, sol) = advance(env, state, &cmd, params);
    if !env.in_bounds(&next.pose) || !next.pose.is_finite() {
        return Err(SimError::Diverged { step: 0 });
    }
    Ok((next, target, sol.wrench))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub pose: Pose,
    pub wrench: Wrench,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reproduction {
    pub trajectory: Vec<TrajectoryPoint>,
    pub success: bool,
    /// Step at which the body left the bounds, if it did.
    pub diverged_at: Option<usize>,
}

impl Reproduction {
    pub fn final_pose(&self) -> Pose {
        self.trajectory.last().expect("trajectory holds the start").pose
    }
}

/// Runs the primitive from `start` until the goal is reached, the body
/// leaves the workspace, or `max_steps` elapse.
pub fn reproduce(
    primitive: &CompliantPrimitive,
    env: &Environment,
    start: &Pose,
    max_steps: usize,
    params: &SimParams,
) -> Reproduction {
    let mut state = BodyState::new(*start);
    let mut target = *start;
    let mut success = env.in_goal(start);
    let mut trajectory = vec![TrajectoryPoint {
        t: 0.0,
        pose: *start,
        wrench: Wrench::default(),
        success,
    }];
    let mut diverged_at = None;
    let mut step = 0;
    while !success && step < max_steps {
        step += 1;
        match step_controller(env, &state, primitive, &target, params) {
            Ok((next, next_target, wrench)) => {
                state = next;
                target = next_target;
                success = env.in_goal(&state.pose);
                trajectory.push(TrajectoryPoint {
                    t: step as f64 * params.dt,
                    pose: state.pose,
                    wrench,
                    success,
                });
            }
            Err(_) => {
                diverged_at = Some(step);
                break;
            }
        }
    }
    Reproduction {
        trajectory,
        success,
        diverged_at,
    }
}

pub const TRAJECTORY_HEADER: &str = "t,px,py,pz,qw,qx,qy,qz,fx,fy,fz,tx,ty,tz,success";

/// Writes the trajectory as CSV. A seed, when given, goes on a leading
/// `#` comment line.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &[TrajectoryPoint], seed: Option<u64>) -> std::io::Result<()> {
    if let Some(s) = seed {
        writeln!(w, "# seed={s}")?;
    }
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for p in traj {
        let q = p.pose.wxyz();
        let (x, f, t) = (p.pose.position, p.wrench.force, p.wrench.torque);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.t, x.x, x.y, x.z, q[0], q[1], q[2], q[3], f.x, f.y, f.z, t.x, t.y, t.z, p.success as u8
        )?;
    }
    Ok(())
}
