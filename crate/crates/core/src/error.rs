use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("domain too large: {valuations} valuations exceed the cap of {cap}")]
    DomainTooLarge { valuations: u128, cap: u64 },
    #[error("incompatible assignments: {0}")]
    IncompatibleAssignments(String),
    #[error("assignment image for `{0}` is not ground")]
    NonGroundImage(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("incompatible models: {0}")]
    IncompatibleModels(String),
    #[error("model is not saturated")]
    NotSaturated,
    #[error("model is already saturated")]
    AlreadySaturated,
    #[error("initial valuation is not total: {0}")]
    IniNotTotal(String),
    #[error("model is not output-rich: {0}")]
    NotOutputRich(String),
    #[error("cannot derive renaming for context variable `{variable}` on gate `{gate}`")]
    RenamingNotDerivable { gate: String, variable: String },
    #[error("initial valuation violates the initial guard")]
    IniViolatesIg,
    #[error("isomorphism search limited to {cap} locations, model has {locations}")]
    IsoCapExceeded { locations: usize, cap: usize },
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
