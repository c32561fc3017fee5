//! End-to-end learning: demonstrations in, compliant primitive out.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::compliance::{demo_means, select_num_axes, stiffness_matrix, ComplianceResult};
use crate::direction::{learn_desired_direction, path_lengths, DesiredDirectionResult};
use crate::error::{Result, Stage};
use crate::preproc::{aggregate, total_motion};
use crate::types::{
    execution_speeds, validate_demonstration, Channel, CompliantPrimitive, Demonstration, LearnerConfig,
    MotionStep,
};
use crate::work::{is_three_dof_compliant, work_profile, WorkProfile};

/// Everything learned for one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub channel: Channel,
    pub work: WorkProfile,
    pub three_dof_compliant: bool,
    /// Path length summed over all demonstrations.
    pub total_motion: f64,
    /// The channel barely moved, so it is held stiff without further analysis.
    pub stationary: bool,
    pub direction: Option<DesiredDirectionResult>,
    pub compliance: Option<ComplianceResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnReport {
    pub primitive: CompliantPrimitive,
    pub translation: ChannelReport,
    pub rotation: ChannelReport,
    pub demo_ids: Vec<String>,
    pub steps_per_demo: Vec<usize>,
    pub config: LearnerConfig,
    pub warnings: Vec<String>,
}

impl LearnReport {
    pub fn channel(&self, channel: Channel) -> &ChannelReport {
        match channel {
            Channel::Translation => &self.translation,
            Channel::Rotation => &self.rotation,
        }
    }
}

fn learn_channel(
    demos: &[Vec<MotionStep>],
    channel: Channel,
    cfg: &LearnerConfig,
    warnings: &mut Vec<String>,
) -> Result<(ChannelReport, Matrix3<f64>)> {
    let all: Vec<MotionStep> = demos.iter().flatten().copied().collect();
    let work = work_profile(&all, channel);
    let three_dof = is_three_dof_compliant(&work, cfg.sigma_work);
    let moved = total_motion(&all, channel);
    let k = cfg.stiffness(channel);
    let mut report = ChannelReport {
        channel,
        work,
        three_dof_compliant: three_dof,
        total_motion: moved,
        stationary: false,
        direction: None,
        compliance: None,
    };
    if three_dof {
        return Ok((report, Matrix3::zeros()));
    }
    if moved < cfg.motion_floor(channel) {
        report.stationary = true;
        return Ok((report, Matrix3::identity() * k));
    }

    let dir = learn_desired_direction(demos, channel, cfg).map_err(|e| e.at(Stage::Direction, Some(channel)))?;
    if dir.n_contrary > 0 {
        warnings.push(format!(
            "{channel}: {} step(s) with the wrench along the motion were dropped",
            dir.n_contrary
        ));
    }
    if dir.direction.is_none() {
        warnings.push(format!(
            "{channel}: inlier ratio {:.3} below {:.3}, no desired direction",
            dir.inlier_ratio, cfg.zeta
        ));
    }
    let means = demo_means(demos, channel);
    let comp = select_num_axes(&means, dir.direction.as_ref(), cfg.sigma_demo)
        .map_err(|e| e.at(Stage::Compliance, Some(channel)))?;
    let stiffness = stiffness_matrix(&comp.axes, k).map_err(|e| e.at(Stage::Compliance, Some(channel)))?;
    report.direction = Some(dir);
    report.compliance = Some(comp);
    Ok((report, stiffness))
}

pub fn learn_primitive(demos: &[Demonstration], cfg: &LearnerConfig) -> Result<LearnReport> {
    cfg.validate()?;
    let mut steps = Vec::with_capacity(demos.len());
    for demo in demos {
        validate_demonstration(demo).map_err(|e| e.at(Stage::Validate, None))?;
        steps.push(aggregate(demo, cfg).map_err(|e| e.at(Stage::Aggregate, None))?);
    }
    if steps.is_empty() {
        return Err(crate::error::Error::NoInput);
    }

    let mut warnings = Vec::new();
    let (translation, k_f) = learn_channel(&steps, Channel::Translation, cfg, &mut warnings)?;
    let (rotation, k_o) = learn_channel(&steps, Channel::Rotation, cfg, &mut warnings)?;
    // nothing moved at all: there is no task to learn
    if translation.stationary && rotation.stationary {
        let channel = Channel::Translation;
        return Err(crate::error::Error::NoUsableSteps { channel }.at(Stage::Direction, Some(channel)));
    }
    if translation.three_dof_compliant && rotation.three_dof_compliant {
        warnings.push("both channels are 3-DOF compliant; the primitive commands no wrench".into());
    }

    let v_d = translation.direction.as_ref().and_then(|d| d.direction);
    let w_d = rotation.direction.as_ref().and_then(|d| d.direction);
    let parts = path_lengths(&steps);
    let pitch = (v_d.is_some() && w_d.is_some()).then(|| parts.0 / parts.1);
    let (nu, lambda) = execution_speeds(v_d.is_some(), w_d.is_some(), Some(parts), cfg);
    let primitive = CompliantPrimitive::new(
        v_d,
        w_d,
        k_f,
        k_o,
        pitch,
        nu,
        lambda,
        translation.three_dof_compliant,
        rotation.three_dof_compliant,
    )
    .map_err(|e| e.at(Stage::Primitive, None))?;

    Ok(LearnReport {
        primitive,
        translation,
        rotation,
        demo_ids: demos.iter().map(|d| d.id.clone()).collect(),
        steps_per_demo: steps.iter().map(Vec::len).collect(),
        config: cfg.clone(),
        warnings,
    })
}
