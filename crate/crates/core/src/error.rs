use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Each variant carries a stable short code (see [`Error::code`]) that the
/// command-line front end prints as `ERROR <code>: <message>`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("skewness {gamma} is outside the skew-normal family (|gamma| must stay below {bound})")]
    InfeasibleSkewness { gamma: f64, bound: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular design: {0}")]
    SingularDesign(String),

    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("abscissae must be strictly increasing (violated at index {index})")]
    NonMonotoneAbscissae { index: usize },

    #[error("observations must be strictly monotone (violated at index {index})")]
    NonMonotoneData { index: usize },

    #[error("no sign change of the asymptote equation on ({lo}, {hi})")]
    NoBracket { lo: f64, hi: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("no feasible offset: {0}")]
    NoFeasibleOffset(String),

    #[error("fitted curve does not decay (quadratic coefficient {m} must be positive)")]
    NonDecayingFit { m: f64 },

    #[error("standard deviation never decreases after its maximum")]
    NoDecreasingTail,

    #[error("no admissible dose on [{lo}, {hi}]")]
    NoAdmissibleDose { lo: f64, hi: f64 },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("line {line}: negative dose {dose}")]
    NegativeDose { line: usize, dose: f64 },

    #[error("input contains no observations")]
    EmptyInput,

    #[error("cohort at dose {dose} is degenerate: {reason}")]
    DegenerateCohort { dose: f64, reason: String },

    #[error("model document line {line}: {reason}")]
    Document { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InfeasibleSkewness { .. } => "InfeasibleSkewness",
            Error::DegenerateSample(_) => "DegenerateSample",
            Error::Domain(_) => "DomainError",
            Error::SingularDesign(_) => "SingularDesign",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::NonMonotoneAbscissae { .. } => "NonMonotoneAbscissae",
            Error::NonMonotoneData { .. } => "NonMonotoneData",
            Error::NoBracket { .. } => "NoBracket",
            Error::NonFinite(_) => "NonFinite",
            Error::NoFeasibleOffset(_) => "NoFeasibleOffset",
            Error::NonDecayingFit { .. } => "NonDecayingFit",
            Error::NoDecreasingTail => "NoDecreasingTail",
            Error::NoAdmissibleDose { .. } => "NoAdmissibleDose",
            Error::Parse { .. } => "ParseError",
            Error::NegativeDose { .. } => "NegativeDose",
            Error::EmptyInput => "EmptyInput",
            Error::DegenerateCohort { .. } => "DegenerateCohort",
            Error::Document { .. } => "DocumentError",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {value}")))
    }
}
