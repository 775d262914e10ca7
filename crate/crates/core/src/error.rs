use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed caller input: out-of-range parameters, bad ids, bad files.
    #[error("input error: {0}")]
    Input(String),

    #[error("vertex {vertex} out of range for graph with {vertex_count} vertices")]
    InvalidVertex { vertex: usize, vertex_count: usize },

    /// The input is well formed but the operation is undefined on it.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no candidate cut in the threshold window [{c_min}, {c_max}] (vol0 or conn badly tuned)")]
    NoCandidateCut { c_min: f64, c_max: f64 },

    #[error("no valid vol0 up to {vol0_max}; best conductance seen: {best_phi:?}")]
    NoValidVol0 { vol0_max: f64, best_phi: Option<f64> },

    #[error("both nibble modes failed: gap mode: {gap}; classic mode: {classic}")]
    BothModesFailed { gap: Box<Error>, classic: Box<Error> },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("induced subgraph is disconnected")]
    Disconnected,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
