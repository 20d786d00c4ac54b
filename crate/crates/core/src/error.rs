use thiserror::Error;

/// Every failure the library can report.
///
/// Each variant has a stable machine-readable [`code`](Error::code) that the
/// CLI prints and that tests pin.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: {context} (max |M - M^dag| = {deviation:.3e})")]
    NonHermitian { context: String, deviation: f64 },

    #[error("eigensolver failed to converge on a {0}x{0} matrix")]
    EigenFailure(usize),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("region of instrument '{0}' is not achronal")]
    NotAchronal(String),

    #[error("initial region does not strictly precede every point of instrument '{0}'")]
    InitialNotPreceding(String),

    #[error("boost velocity has |v| = {0} >= 1")]
    SuperluminalFrame(f64),

    #[error("operators '{first}' and '{second}' do not commute (||[A,B]|| = {norm:.3e})")]
    NonCommuting {
        first: String,
        second: String,
        norm: f64,
    },

    #[error("outcome function failed to evaluate: {0}")]
    InvalidOutcomeFunction(String),

    #[error("instruments '{0}' and '{1}' share a frame time but their projectors do not commute")]
    AmbiguousFrameOrder(String, String),

    #[error("the Bloch rule needs a Lorentz frame; none was supplied")]
    MissingFrame,

    #[error("same-stage portions '{0}' and '{1}' do not commute")]
    StageCommutationFailure(String, String),

    #[error("unknown axis '{0}'")]
    UnknownAxis(String),

    #[error("conditioning event has probability {0:.3e}")]
    ConditionOnNull(f64),

    #[error("instruments '{0}' and '{1}' are not spacelike separated")]
    NotSpacelike(String, String),

    #[error("inconsistent collapse order: {0}")]
    InconsistentOrder(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("portions overlap on {0}")]
    OverlappingPortions(String),

    #[error("observable portion '{0}' straddles several causal portions")]
    PortionStraddlesStages(String),

    #[error("schema error at {path}: {message}")]
    SchemaError { path: String, message: String },

    #[error("parse error at byte {offset}: {message}")]
    ParseError { offset: usize, message: String },

    #[error("variable b{index} exceeds arity {arity}")]
    ArityError { index: usize, arity: usize },
}

impl Error {
    /// Stable identifier for the failure class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonHermitian { .. } => "NonHermitian",
            Error::EigenFailure(_) => "EigenFailure",
            Error::InvalidState(_) => "InvalidState",
            Error::NotAchronal(_) => "NotAchronal",
            Error::InitialNotPreceding(_) => "InitialNotPreceding",
            Error::SuperluminalFrame(_) => "SuperluminalFrame",
            Error::NonCommuting { .. } => "NonCommuting",
            Error::InvalidOutcomeFunction(_) => "InvalidOutcomeFunction",
            Error::AmbiguousFrameOrder(..) => "AmbiguousFrameOrder",
            Error::MissingFrame => "MissingFrame",
            Error::StageCommutationFailure(..) => "StageCommutationFailure",
            Error::UnknownAxis(_) => "UnknownAxis",
            Error::ConditionOnNull(_) => "ConditionOnNull",
            Error::NotSpacelike(..) => "NotSpacelike",
            Error::InconsistentOrder(_) => "InconsistentOrder",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::OverlappingPortions(_) => "OverlappingPortions",
            Error::PortionStraddlesStages(_) => "PortionStraddlesStages",
            Error::SchemaError { .. } => "SchemaError",
            Error::ParseError { .. } => "ParseError",
            Error::ArityError { .. } => "ArityError",
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaError {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
