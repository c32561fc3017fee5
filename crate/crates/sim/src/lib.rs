//! Quasi-static contact simulator for synthesizing demonstrations and
//! replaying learned primitives.

pub mod contact;
pub mod controller;
pub mod env;
pub mod error;
pub mod scenarios;
pub mod teacher;

pub use contact::{advance, contact_wrench, BodyState, SimParams, Twist, Wrench};
pub use controller::{reproduce, step_controller, Reproduction, TrajectoryPoint};
pub use env::Environment;
pub use error::{Result, SimError};
pub use teacher::{generate_demo, DemoSpec, NoiseSpec, TeacherSpec};
