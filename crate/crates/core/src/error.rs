use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("trajectory must contain at least one shot")]
    EmptyTrajectory,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scanner configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("cannot rescale {group}: source trajectory has zero {group} but the target is {target}")]
    Unscalable { group: &'static str, target: f64 },

    #[error("shot index {index} out of range for trajectory of length {len}")]
    ShotOutOfRange { index: usize, len: usize },

    #[error("trajectory has {available} poses but the plan needs {required}")]
    TrajectoryTooShort { required: usize, available: usize },

    #[error("pose has through-plane motion (tz={tz}, rx={rx}, ry={ry}); enable ignore_through_plane to drop it")]
    UnsupportedMotion { tz: f64, rx: f64, ry: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("single-class input: {0}")]
    SingleClass(String),

    #[error("unpaired comparison: {0}")]
    Unpaired(String),

    #[error("duplicate record id {0:?}")]
    DuplicateId(String),

    #[error("unknown image format for {}", .0.display())]
    UnknownFormat(PathBuf),

    #[error("malformed {what} in {}: {detail}", path.display())]
    Malformed {
        what: &'static str,
        path: PathBuf,
        detail: String,
    },

    #[error("record {id}: stored metrics do not match recomputation ({detail})")]
    MetricsMismatch { id: String, detail: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(what: &'static str, path: impl Into<PathBuf>, detail: impl Into<String>) -> Self {
        Error::Malformed {
            what,
            path: path.into(),
            detail: detail.into(),
        }
    }
}
