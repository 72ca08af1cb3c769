use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("operands belong to different series contexts")]
    ContextMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero series has no inverse or factorization")]
    ZeroSeries,
    #[error("residue map needs a non-negative valuation, got {0}")]
    NegativeValuation(i64),
    #[error("sequence is not pseudo-Cauchy: {0}")]
    NotPseudoCauchy(String),
    #[error("pseudo-Cauchy prefix is too short to tell its limit case")]
    UndeterminedCase,
    #[error("incompatible automorphism: {0}")]
    IncompatibleAutomorphism(String),
    #[error("value out of machine range: {0}")]
    Overflow(String),
}

impl Error {
    /// Stable identifier used in machine-readable error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::ContextMismatch => "ContextMismatch",
            Error::DivisionByZero => "DivisionByZero",
            Error::ZeroSeries => "ZeroSeries",
            Error::NegativeValuation(_) => "NegativeValuation",
            Error::NotPseudoCauchy(_) => "NotPseudoCauchy",
            Error::UndeterminedCase => "UndeterminedCase",
            Error::IncompatibleAutomorphism(_) => "IncompatibleAutomorphism",
            Error::Overflow(_) => "Overflow",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
