use thiserror::Error;

/// Coarse error class, used by front ends to pick exit codes and HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Validation,
    UnsupportedOrder,
    Io,
    Numerical,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Validation => "validation",
            Category::UnsupportedOrder => "order",
            Category::Io => "io",
            Category::Numerical => "numerical",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {found} cells, expected {expected}")]
    NotSquare {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("unsupported order {order}: expected {min}..={max}")]
    UnsupportedOrder { order: usize, min: usize, max: usize },

    #[error("entry ({row},{col}) must be strictly positive, got {value}")]
    NonPositive { row: usize, col: usize, value: String },

    #[error("diagonal entry ({index},{index}) must be 1, got {value}")]
    Diagonal { index: usize, value: String },

    #[error("entries ({row},{col}) = {upper} and ({col},{row}) = {lower} are not reciprocal")]
    Reciprocity {
        row: usize,
        col: usize,
        upper: String,
        lower: String,
    },

    #[error("malformed cell {0:?}")]
    MalformedCell(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("logistic fit failed: {0}")]
    Fit(String),

    #[error("perfect separation detected after {iterations} iterations (coefficient norm {norm:.3e})")]
    PerfectSeparation { iterations: usize, norm: f64 },

    #[error("clustering failed: {0}")]
    Clustering(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::UnsupportedOrder { .. } => Category::UnsupportedOrder,
            Error::NoConvergence { .. }
            | Error::Fit(_)
            | Error::PerfectSeparation { .. }
            | Error::Clustering(_) => Category::Numerical,
            Error::Io(_) => Category::Io,
            Error::Csv(e) if e.is_io_error() => Category::Io,
            _ => Category::Validation,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
