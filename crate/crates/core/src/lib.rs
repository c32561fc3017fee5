//! Learning linear compliant motion primitives from kinesthetic
//! demonstrations.
//!
//! A primitive is a desired translational and rotational direction plus
//! stiffness matrices whose axes are either stiff or fully compliant. The
//! learner works in five stages: validation, windowed aggregation into motion
//! steps, a work-sign test for fully compliant channels, the desired
//! direction from intersecting admissible pushing sectors, and the number of
//! compliant axes from PCA with an information criterion.

pub mod compliance;
pub mod direction;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod preproc;
pub mod so3;
pub mod types;
pub mod work;

pub use error::{Error, Result, Stage};
pub use pipeline::{learn_primitive, ChannelReport, LearnReport};
pub use types::{
    Channel, CompliantPrimitive, Demonstration, Frame, LearnerConfig, MotionStep, Pose, WrenchSample,
};
