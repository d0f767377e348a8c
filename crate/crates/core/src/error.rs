use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("index {index} out of range ({range})")]
    IndexOutOfRange { index: i64, range: String },

    #[error("pole at x = {at}: {what}")]
    Pole { at: String, what: String },

    #[error("need at least {need} (odd count) equispaced values, got {got}")]
    InsufficientValues { need: usize, got: usize },

    #[error("zero Pochhammer denominator ({b})_{s}")]
    ZeroPochhammer { b: String, s: usize },

    /// The discrete system hit a division by zero.
    #[error("singular trajectory at n = {n}: {reason} (x_n = {x}, y_n = {y})")]
    Singular { n: usize, reason: String, x: String, y: String },

    #[error("singular Painleve V sample: y = {y} ({reason})")]
    SingularSample { y: String, reason: String },

    #[error("root recovery failed: {0}")]
    RootRecovery(String),

    #[error("bracket [{lo}, {hi}] does not straddle a sign change")]
    NoSignChange { lo: String, hi: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_singular(&self) -> bool {
        matches!(self, Error::Singular { .. } | Error::SingularSample { .. })
    }
}
