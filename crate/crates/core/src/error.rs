use thiserror::Error;

/// Errors raised by sampling, mobility, policy, metric and experiment code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("deployment has no base stations")]
    EmptyDeployment,

    #[error("unknown base station id {0}")]
    UnknownStation(usize),

    #[error("trajectory leaves the measurement region: {0}")]
    TrajectoryOutside(String),

    #[error("arc-length {s} outside trajectory [0, {length}]")]
    ArcLengthOutOfRange { s: f64, length: f64 },

    #[error("policy `{policy}` requires the `{field}` threshold")]
    MissingThreshold {
        policy: &'static str,
        field: &'static str,
    },

    #[error("inconsistent skip flags: {0}")]
    InconsistentSkips(String),

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("deployment resampling limit ({0} attempts) exceeded")]
    ResampleLimit(usize),

    #[error("calibration target {target} unreachable within [{lo}, {hi}] (achieved {achieved_lo} .. {achieved_hi})")]
    CalibrationUnreachable {
        target: f64,
        lo: f64,
        hi: f64,
        achieved_lo: f64,
        achieved_hi: f64,
    },

    #[error("unknown reproduction id `{0}`")]
    UnknownArtifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
