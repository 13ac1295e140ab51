use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {n} outside supported range [{min}, {max}]")]
    Dimension { n: usize, min: usize, max: usize },

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("{name} = {value} outside {range}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        range: String,
    },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix has shape {rows}x{cols}, expected {expected}x{expected}")]
    Shape {
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("frame is not orthonormal (Gram defect {0:e})")]
    FrameNotOrthonormal(f64),

    #[error("frame has {got} vectors, expected {expected}")]
    FrameSize { got: usize, expected: usize },

    #[error("values are not sorted in ascending order")]
    Unsorted,

    #[error("sectional curvature needs two distinct indices, got ({0}, {0})")]
    DegeneratePlane(usize),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("no closed-form spectrum is known for model kind `{0}`")]
    NoClosedFormSpectrum(&'static str),

    #[error("tensor is not Kähler for this complex structure (residual {0:e})")]
    NotKahler(f64),

    #[error("frame is not adapted to the complex structure (defect {0:e})")]
    NotJAdapted(f64),

    #[error("complex structure is invalid (defect {0:e})")]
    InvalidComplexStructure(f64),

    #[error("tensor file {path}: {reason}")]
    TensorFile { path: String, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn range_err(name: &'static str, value: f64, range: impl Into<String>) -> Error {
    Error::ParameterRange {
        name,
        value,
        range: range.into(),
    }
}
