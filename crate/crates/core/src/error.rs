use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid belief: {0}")]
    InvalidBelief(String),

    #[error("category index {index} out of range (instance has {len} categories)")]
    CategoryOutOfRange { index: usize, len: usize },

    #[error("type index {index} out of range (instance has {len} types)")]
    TypeOutOfRange { index: usize, len: usize },

    /// The posterior after a like is undefined because the like had probability zero.
    #[error("zero likelihood at step {step}: category {category} has zero like probability under the current belief")]
    ZeroLikelihood { step: usize, category: usize },

    #[error("budget exceeded in {what}: {required} > {limit}")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("instance is not well-separated (separator is 0)")]
    NotWellSeparated,

    #[error("belief is not ({delta}, m{type_index})-concentrated")]
    NotConcentrated { delta: f64, type_index: usize },

    #[error("walk did not converge")]
    NotConverged,

    #[error("curve has fewer than 3 strictly positive entries ({0})")]
    DegenerateCurve(usize),

    #[error("latent vector with zero norm persisted after {0} resamples")]
    DegenerateLatents(usize),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable code, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInstance(_) => "invalid_instance",
            Error::InvalidBelief(_) => "invalid_belief",
            Error::CategoryOutOfRange { .. } => "category_out_of_range",
            Error::TypeOutOfRange { .. } => "type_out_of_range",
            Error::ZeroLikelihood { .. } => "zero_likelihood",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::NotWellSeparated => "not_well_separated",
            Error::NotConcentrated { .. } => "not_concentrated",
            Error::NotConverged => "not_converged",
            Error::DegenerateCurve(_) => "degenerate_curve",
            Error::DegenerateLatents(_) => "degenerate_latents",
            Error::UnknownFixture(_) => "unknown_fixture",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse { .. } => "parse_error",
            Error::Io(_) => "io_error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
