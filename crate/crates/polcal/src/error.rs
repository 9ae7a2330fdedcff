use thiserror::Error;

/// Errors produced by the calibration library and the dataset layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular distortion matrix")]
    SingularDistortion,
    #[error("copolar gain zero")]
    CopolarGainZero,
    #[error("degenerate calibration matrix")]
    DegenerateCalibration,
    #[error("ambiguous reflector estimate")]
    AmbiguousReflector,
    #[error("cannot normalize")]
    CannotNormalize,
    #[error("degenerate clutter geometry")]
    DegenerateClutter,
    #[error("copolar ratio pole")]
    CopolarRatioPole,
    #[error("target has a \u{2248} b, cross-talk unobservable")]
    TargetUnobservable,
    #[error("rotation singular")]
    RotationSingular,
    #[error("empty window")]
    EmptyWindow,
    #[error("window out of image bounds")]
    WindowOutOfBounds,
    #[error("no signal in window")]
    NoPeak,
    #[error("patch must contain at least {min} pixels, got {got}")]
    PatchTooSmall { min: usize, got: usize },
    #[error("at least {min} masked pixels required, got {got}")]
    TooFewPixels { min: usize, got: usize },
    #[error("covariance not positive semidefinite")]
    NotPsd,
    #[error("boxcar window must be odd, got {0}")]
    EvenBoxcar(usize),
    #[error("scene config invalid: {0}")]
    BadSceneConfig(String),
    #[error("pipeline stage mismatch: operation requires {expected} data, dataset is {found} (missing step: {missing})")]
    StageMismatch {
        expected: &'static str,
        found: &'static str,
        missing: &'static str,
    },
    #[error("plane {plane} size mismatch: expected {expected} bytes, found {found}")]
    PlaneSizeMismatch {
        plane: &'static str,
        expected: u64,
        found: u64,
    },
    #[error("missing plane file {0}")]
    MissingPlane(&'static str),
    #[error("unknown dtype {0:?} (expected \"c64\" or \"c128\")")]
    UnknownDtype(String),
    #[error("unsupported format_version {0}")]
    UnsupportedFormatVersion(u32),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("image encode error: {0}")]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, Error>;
