use thiserror::Error;

use crate::types::Channel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage names used to tag propagated errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Validate,
    Aggregate,
    Work,
    Direction,
    Compliance,
    Primitive,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Validate => "validate",
            Stage::Aggregate => "aggregate",
            Stage::Work => "work",
            Stage::Direction => "direction",
            Stage::Compliance => "compliance",
            Stage::Primitive => "primitive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("demonstration has fewer than 2 samples (sample {index} missing)")]
    EmptyDemo { index: usize },
    #[error("timestamps not strictly increasing at sample {index}")]
    NonMonotoneTime { index: usize },
    #[error("non-finite value in sample {index}")]
    NonFiniteValue { index: usize },
    #[error("quaternion norm {norm} is not unit")]
    NonUnitQuaternion { norm: f64 },

    #[error("rotation angle {angle} rad is too close to pi for a well-defined axis")]
    AngleNearPi { angle: f64 },
    #[error("rotation vector norm {norm} exceeds pi")]
    RotationTooLarge { norm: f64 },
    #[error("window {index} rotates by pi or more")]
    InvalidWindow { index: usize },
    #[error("only {windows} window(s) available, at least 2 required")]
    TooShort { windows: usize },
    #[error("window length must be at least 1")]
    ZeroWindow,
    #[error("no step carries a {channel} motion direction")]
    NoMotion { channel: Channel },

    #[error("cannot project a zero vector to angle space")]
    ZeroVector,
    #[error("angle vector norm {norm} is outside [0, pi)")]
    OutOfDomain { norm: f64 },
    #[error("step lacks the motion or wrench direction needed for a sector")]
    MissingDirection,
    #[error("no usable {channel} steps for direction learning")]
    NoUsableSteps { channel: Channel },
    #[error("total rotation below floor, pitch undefined")]
    NoRotation,

    #[error("no mean directions supplied")]
    NoInput,
    #[error("compliant axes are not orthonormal")]
    NonOrthonormalAxes,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid primitive: {0}")]
    InvalidPrimitive(String),

    #[error("{stage} stage failed ({channel:?}): {source}")]
    Stage {
        stage: Stage,
        channel: Option<Channel>,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub fn at(self, stage: Stage, channel: Option<Channel>) -> Error {
        Error::Stage {
            stage,
            channel,
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for errors caused by malformed or invalid input data rather than
    /// by the learning stages.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self.root(),
            Error::EmptyDemo { .. }
                | Error::NonMonotoneTime { .. }
                | Error::NonFiniteValue { .. }
                | Error::NonUnitQuaternion { .. }
                | Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
                | Error::Format(_)
                | Error::InvalidConfig(_)
        )
    }
}
