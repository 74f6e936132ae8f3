use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group order {order} exceeds the cap of {cap}")]
    OrderTooLarge { order: usize, cap: usize },
    #[error("operation requires a {expected} group, got `{label}`")]
    WrongGroupKind { expected: &'static str, label: String },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid index set or window: {0}")]
    InvalidSet(String),
    #[error("matrix for element {element} is not unitary (deviation {deviation:.3e})")]
    NotUnitary { element: usize, deviation: f64 },
    #[error("matrices do not form a projective representation: {0}")]
    NotProjective(String),
    #[error("matrices do not form an honest representation (cocycle deviation {deviation:.3e})")]
    NotHomomorphism { deviation: f64 },
    #[error("formal degree probes disagree: min {min}, max {max}")]
    InconsistentDegree { min: f64, max: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },
    #[error("system is not a frame (lower bound {lower:.3e}, upper bound {upper:.3e})")]
    NotAFrame { lower: f64, upper: f64 },
    #[error("frame bounds ({lower}, {upper}) are not inside (0, 2)")]
    NotSubcritical { lower: f64, upper: f64 },
    #[error("frame is not overcomplete: upper frame measure {m_plus} is not below 1")]
    NotOvercomplete { m_plus: f64 },
    #[error("removal pipeline emptied the candidate set while shrinking")]
    PipelineExhausted,
    #[error("removal set is not a subset of the index set (element {0})")]
    GammaNotSubset(usize),
    #[error("removal set is not removable: {0}")]
    GammaNotRemovable(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("JSON parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
