use thiserror::Error;

/// Every failure the library can report.
///
/// Model-construction variants double as diagnostics in [`crate::model::validate`].
/// `Undefined` conditionals are not errors; see [`crate::Probability`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cycle detected through {0}")]
    CycleDetected(String),
    #[error("variable {0} has parents but no facilitating parent")]
    NoFacilitatingParent(String),
    #[error("edge {0} has a scope that does not name facilitating edges into its target")]
    DanglingScope(String),
    #[error("bad probability for {field}: {value}")]
    BadProbability { field: String, value: f64 },
    #[error("duplicate name {0}")]
    DuplicateName(String),
    #[error("invalid identifier {0:?}")]
    InvalidName(String),
    #[error("exogenous variable {0} needs a base rate")]
    MissingBaseRate(String),
    #[error("variable {0} has parents and must not carry a base rate")]
    UnexpectedBaseRate(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("variable {0} is exogenous and has no structural equation")]
    ExogenousVariable(String),
    #[error("missing literal {0} in assignment")]
    MissingLiteral(String),
    #[error("model too large for exact enumeration: {size} exceeds cap {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("joint table variables do not match the model")]
    Mismatch,
    #[error("no direct edge {0} -> {1}")]
    NoDirectEdge(String, String),
    #[error("no directed path {0} -> {1}")]
    NoPath(String, String),
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("dataset does not match model: {0}")]
    DataModelMismatch(String),
    #[error("two computations of {what} disagree: {left} vs {right}")]
    RouteMismatch { what: String, left: f64, right: f64 },
    #[error("invalid rubin model: {0}")]
    InvalidRubin(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
