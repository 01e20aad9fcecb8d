use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("wavelength grids do not match")]
    GridMismatch,

    #[error("band {0} nm not found on grid")]
    BandNotFound(f64),

    #[error("normalizer at {band} nm is not positive ({value})")]
    DegenerateNormalizer { band: f64, value: f64 },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("calibration is singular (condition number {condition:.3e})")]
    SingularCalibration { condition: f64 },

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("chart layout {cols}x{rows} too fine for a {width}x{height} image")]
    LayoutTooFine {
        cols: usize,
        rows: usize,
        width: usize,
        height: usize,
    },

    #[error("no profile stored for device '{0}'")]
    ProfileNotFound(String),

    #[error("corrupt profile {path}: {reason}")]
    ProfileCorrupt { path: PathBuf, reason: String },

    #[error("ROI at ({x}, {y}) side {side} lies outside {width}x{height}")]
    RoiOutOfBounds {
        x: usize,
        y: usize,
        side: usize,
        width: usize,
        height: usize,
    },

    #[error("bad range: {0}")]
    BadRange(String),

    #[error("training diverged: {0}")]
    TrainingDiverged(String),

    #[error("bad hyperparameter: {0}")]
    BadHyperparameter(String),

    #[error("feature mode mismatch: model expects {expected}, got {found}")]
    FeatureModeMismatch { expected: String, found: String },

    #[error("subset of {n} rows is too small (minimum {min})")]
    SubsetTooSmall { n: usize, min: usize },

    #[error("correlation undefined: a column is constant")]
    UndefinedCorrelation,

    #[error("regression undefined: predictor column is constant")]
    UndefinedRegression,

    #[error("ROC undefined: only one class present")]
    DegenerateRoc,

    #[error("malformed {what}: {reason}")]
    Format { what: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn format(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Format {
            what: what.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error: 3 for I/O, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}
