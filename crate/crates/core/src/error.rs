use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("curve too short: grid point {index} would exceed y_max = {y_max}")]
    CurveTooShort { index: usize, y_max: f64 },

    #[error("non-convexity detected: {0}")]
    NonConvex(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid model data: {0}")]
    InvalidModel(String),

    #[error("exclusion sequence is not monotone at index {index} ({prev} < {next})")]
    NonMonotoneExclusion { index: usize, prev: f64, next: f64 },

    #[error("indifference lines {first} and {second} cross inside the closed square")]
    NonNested { first: usize, second: usize },

    #[error("wrong method: {0}")]
    WrongMethod(String),

    #[error("premium condition c(z_1) > F(y_1) fails")]
    NoPremium,

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("schedule is not discretely nested: levels {0} and {1} violate containment")]
    NotDiscretelyNested(usize, usize),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("expression error at column {column}: {message}")]
    Expression { column: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
