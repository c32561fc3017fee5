//! Turns raw recordings into windowed motion steps.
//!
//! Window `k` spans samples `k·w ..= (k+1)·w`, so consecutive windows share
//! their boundary sample and no displacement is lost between them. A
//! recording of `N` samples yields `⌊(N−1)/w⌋` steps; any trailing partial
//! window is discarded.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::so3::rotation_log;
use crate::types::{Channel, Demonstration, Frame, LearnerConfig, MotionStep, WrenchSample};

fn unit_if_above(v: Vector3<f64>, floor: f64) -> Option<Vector3<f64>> {
    let n = v.norm();
    (n >= floor).then(|| v / n)
}

/// Force in world axes and torque in body axes for one sample.
fn learning_frame_wrench(s: &WrenchSample, frame: Frame) -> (Vector3<f64>, Vector3<f64>) {
    let rot = s.pose.orientation;
    match frame {
        Frame::World => (s.force, rot.inverse_transform_vector(&s.torque)),
        Frame::Tool => (rot.transform_vector(&s.force), s.torque),
    }
}

pub fn aggregate(demo: &Demonstration, cfg: &LearnerConfig) -> Result<Vec<MotionStep>> {
    let w = cfg.window;
    if w == 0 {
        return Err(Error::ZeroWindow);
    }
    let n = demo.samples.len();
    let windows = n.saturating_sub(1) / w;
    if windows < 2 {
        return Err(Error::TooShort { windows });
    }

    let mut steps = Vec::with_capacity(windows);
    for k in 0..windows {
        let slice = &demo.samples[k * w..=(k + 1) * w];
        let first = &slice[0];
        let last = &slice[slice.len() - 1];

        let dx = last.pose.position - first.pose.position;
        let rel = first.pose.orientation.inverse() * last.pose.orientation;
        let dbeta = rotation_log(&rel).map_err(|_| Error::InvalidWindow { index: k })?;
        // endpoint differencing aliases rotations beyond pi; the summed
        // per-sample increments do not
        let mut unwrapped = Vector3::zeros();
        for pair in slice.windows(2) {
            let inc = pair[0].pose.orientation.inverse() * pair[1].pose.orientation;
            unwrapped += rotation_log(&inc).map_err(|_| Error::InvalidWindow { index: k })?;
        }
        if unwrapped.norm() >= std::f64::consts::PI - crate::so3::NEAR_PI {
            return Err(Error::InvalidWindow { index: k });
        }

        let (mut f, mut t) = (Vector3::zeros(), Vector3::zeros());
        for s in slice {
            let (fs, ts) = learning_frame_wrench(s, demo.frame);
            f += fs;
            t += ts;
        }
        let count = slice.len() as f64;
        let f_raw = f / count;
        let t_raw = t / count;

        steps.push(MotionStep {
            dx,
            dbeta,
            v_hat: unit_if_above(dx, cfg.motion_floor_trans),
            w_hat: unit_if_above(dbeta, cfg.motion_floor_rot),
            f_hat: unit_if_above(f_raw, cfg.wrench_floor_force),
            t_hat: unit_if_above(t_raw, cfg.wrench_floor_torque),
            f_raw,
            t_raw,
        });
    }
    Ok(steps)
}

/// Mean of the present unit motion directions, deliberately not
/// renormalized: its length measures how consistent the motion was.
pub fn mean_direction(steps: &[MotionStep], channel: Channel) -> Result<Vector3<f64>> {
    let (sum, count) = steps
        .iter()
        .filter_map(|s| s.motion_dir(channel))
        .fold((Vector3::zeros(), 0usize), |(acc, c), d| (acc + d, c + 1));
    if count == 0 {
        return Err(Error::NoMotion { channel });
    }
    Ok(sum / count as f64)
}

/// Total path length of a channel over all steps.
pub fn total_motion(steps: &[MotionStep], channel: Channel) -> f64 {
    steps.iter().map(|s| s.motion(channel).norm()).sum()
}
