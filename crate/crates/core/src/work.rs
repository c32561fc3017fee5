//! Work-sign analysis: decides whether the environment, rather than the
//! teacher, drove all translational or all rotational motion.

use serde::{Deserialize, Serialize};

use crate::types::{Channel, MotionStep};

/// Below this total |work| (J) the ratio is meaningless.
pub const ENERGY_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkProfile {
    pub per_step_work: Vec<f64>,
    /// Work done by the environment (sum of positive increments).
    pub w_env: f64,
    /// Path-dependent total work (sum of |increments|).
    pub w_tot: f64,
    pub ratio: f64,
    pub no_work: bool,
}

/// Recorded wrenches are contact wrenches acting on the tool, so a positive
/// increment means the environment did the work.
pub fn work_profile(steps: &[MotionStep], channel: Channel) -> WorkProfile {
    let per_step_work: Vec<f64> = steps
        .iter()
        .map(|s| s.wrench(channel).dot(&s.motion(channel)))
        .collect();
    let w_tot: f64 = per_step_work.iter().map(|w| w.abs()).sum();
    let w_env: f64 = per_step_work.iter().map(|w| w.max(0.0)).sum();
    let no_work = !(w_tot >= ENERGY_FLOOR);
    let ratio = if no_work { 0.0 } else { w_env / w_tot };
    WorkProfile {
        per_step_work,
        w_env,
        w_tot,
        ratio,
        no_work,
    }
}

pub fn is_three_dof_compliant(profile: &WorkProfile, sigma_work: f64) -> bool {
    !profile.no_work && profile.ratio >= sigma_work
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    fn profile_of(works: &[f64]) -> WorkProfile {
        let steps: Vec<MotionStep> = works
            .iter()
            .map(|&w| MotionStep {
                dx: Vector3::new(1.0, 0.0, 0.0),
                dbeta: Vector3::zeros(),
                v_hat: Some(Vector3::x()),
                w_hat: None,
                f_hat: None,
                t_hat: None,
                f_raw: Vector3::new(w, 0.0, 0.0),
                t_raw: Vector3::zeros(),
            })
            .collect();
        work_profile(&steps, Channel::Translation)
    }

    #[test]
    fn mixed_signs() {
        let p = profile_of(&[2.0, -1.0, 1.0, -2.0]);
        assert_eq!(p.w_env, 3.0);
        assert_eq!(p.w_tot, 6.0);
        assert_eq!(p.ratio, 0.5);
        assert!(!is_three_dof_compliant(&p, 0.7));
    }

    #[test]
    fn all_positive_is_full_ratio() {
        let p = profile_of(&[0.5, 1.0, 2.0]);
        assert_eq!(p.ratio, 1.0);
        assert!(is_three_dof_compliant(&p, 0.7));
    }

    #[test]
    fn zero_wrench_flags_no_work() {
        let p = profile_of(&[0.0, 0.0]);
        assert!(p.no_work);
        assert_eq!(p.ratio, 0.0);
        assert!(!is_three_dof_compliant(&p, 0.1));
    }

    #[test]
    fn threshold_examples() {
        let mut p = profile_of(&[1.0]);
        p.ratio = 0.8;
        assert!(is_three_dof_compliant(&p, 0.7));
        p.ratio = 0.5;
        assert!(!is_three_dof_compliant(&p, 0.7));
    }
}
