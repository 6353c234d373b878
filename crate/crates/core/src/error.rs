use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A discretisation or iteration failed to reach the requested accuracy.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// The computational box is too small for the solution to decay at its edges.
    #[error("grid too small: {0}")]
    GridTooSmall(String),

    /// A constructed object violates one of its defining bounds.
    #[error("construction error: {0}")]
    Construction(String),

    /// An internal invariant that should hold by construction was broken.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// Two objects that must share a grid or shape do not.
    #[error("interface mismatch: {0}")]
    Interface(String),

    #[error("index out of range: {0}")]
    Index(String),

    /// Non-finite values appeared during time stepping.
    #[error("non-finite value at step {step} (t = {time}): {what}")]
    NonFinite { step: usize, time: f64, what: String },

    #[error("config error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialisation error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resolution(msg: impl Into<String>) -> Self {
        Error::Resolution(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config { line: None, msg: msg.into() }
    }
}
