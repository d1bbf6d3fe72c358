use thiserror::Error;

/// Crate-wide error type.
///
/// Variants group the failure classes the library surfaces; the CLI maps
/// them onto process exit codes (usage = 1, config/data = 2, runtime = 3).
#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible shapes in a matrix or sequence operation, naming both sides.
    #[error("shape mismatch in {op}: {lhs} vs {rhs}")]
    Shape {
        op: &'static str,
        lhs: String,
        rhs: String,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("split plan error: {0}")]
    Plan(String),
    #[error("tuning error: {0}")]
    Tuning(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(op: &'static str, lhs: (usize, usize), rhs: (usize, usize)) -> Self {
        Error::Shape {
            op,
            lhs: format!("{}x{}", lhs.0, lhs.1),
            rhs: format!("{}x{}", rhs.0, rhs.1),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
