use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{file}:{line}:{column}: syntax error: {message}; expected one of: {}", expected.join(", "))]
    Syntax {
        file: String,
        line: usize,
        column: usize,
        message: String,
        expected: Vec<String>,
    },

    #[error("{file}:{line}:{column}: entry [{row}][{col}] is not homogeneous of degree {order}: stray monomial `{monomial}`")]
    Homogeneity {
        file: String,
        line: usize,
        column: usize,
        row: usize,
        col: usize,
        order: u32,
        monomial: String,
    },

    #[error("unknown builtin operator `{0}`")]
    UnknownBuiltin(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("ellipticity failure at frequency {xi:?}: {detail}")]
    Ellipticity { xi: Vec<i64>, detail: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal self-check failed: {0}")]
    SelfCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
