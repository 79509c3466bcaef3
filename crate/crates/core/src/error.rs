use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("rule is not an instance of the {scheme} template: {detail}")]
    TemplateMismatch { scheme: String, detail: String },
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("arithmetic on unbound variable in `{0}`")]
    UnboundArithmetic(String),
    #[error("bad arithmetic expression `{0}`")]
    BadExpression(String),
    #[error("comparison with unbound side: `{0}`")]
    NonGroundGuard(String),
    #[error("type error: {0}")]
    Type(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("unfolding cannot start: {0}")]
    SchemeFailure(SchemeError),
    #[error("goal failed inside a committed rule body: `{0}`")]
    CommittedBodyFailure(String),
    #[error("no progress: a full round applied no rule to `{0}`")]
    NoProgress(String),
    #[error("step limit of {0} exceeded")]
    StepLimitExceeded(u64),
    #[error("round limit of {0} exceeded")]
    RoundLimitExceeded(u64),
    #[error("unsupported predicate `{0}`")]
    UnsupportedPredicate(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input refused: {0}")]
    ResourceLimit(String),
}

/// Process exit codes shared by the CLI and the C interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum ExitCode {
    Success = 0,
    Failure = 1,
    NoProgress = 2,
    Config = 3,
    ResourceLimit = 4,
}

impl Error {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Error::NoProgress(_) => ExitCode::NoProgress,
            Error::Parse(_)
            | Error::Config(_)
            | Error::InvalidRule(_)
            | Error::UnsupportedPredicate(_)
            | Error::Scheme(SchemeError::UnknownScheme(_)) => ExitCode::Config,
            Error::StepLimitExceeded(_) | Error::RoundLimitExceeded(_) | Error::ResourceLimit(_) => {
                ExitCode::ResourceLimit
            }
            _ => ExitCode::Failure,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
