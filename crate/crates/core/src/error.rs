use thiserror::Error;

use crate::model::GameKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed parameters: {0}")]
    Parse(String),

    #[error("at least one transmitter is required")]
    NoTransmitters,

    #[error("power constraint of transmitter {index} must be positive and finite, got {value}")]
    NonPositivePower { index: usize, value: f64 },

    #[error("jammer power must be non-negative and finite, got {0}")]
    NegativeLambda(f64),

    #[error("eavesdropper gains must be non-negative and finite, got {0}")]
    NegativeGain(f64),

    #[error("a pair of eavesdropper gains requires exactly 2 transmitters, got {found}")]
    GainCountMismatch { found: usize },

    #[error("unsupported game: {0}")]
    UnsupportedGame(String),

    #[error("{count} transmitters exceeds the supported maximum of {max}")]
    TooManyTransmitters { count: usize, max: usize },

    #[error("scaling factor must be positive and finite, got {0}")]
    NonPositiveOmega(f64),

    #[error("operation requires a {expected} game")]
    WrongGameKind { expected: GameKind },

    #[error("rate vector has {found} entries, game has {expected} transmitters")]
    LengthMismatch { expected: usize, found: usize },

    #[error("closed-form emptiness criterion requires zero jammer power, got {0}")]
    LambdaNotZero(f64),

    #[error("grand coalition value is zero")]
    ZeroGrandValue,

    #[error("index {index} out of range for {len} transmitters")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("eavesdropper gains ({h1}, {h2}) are not both below the effective gain {h_lambda}")]
    GainsOutOfRange { h1: f64, h2: f64, h_lambda: f64 },

    #[error("every power constraint must exceed the jammer power {lambda}")]
    PowerBelowLambda { lambda: f64 },

    #[error("no reduced power satisfies the value identity")]
    NoGammaStar,

    #[error("transmitters at ranks {0} and {1} have equal power; ratio is constant")]
    EqualPowers(usize, usize),

    #[error("transmitter at rank {0} is inactive")]
    InactiveIndex(usize),

    #[error("invalid power allocation: {0}")]
    InvalidPowerAllocation(String),

    #[error("grid resolution must be at least 1")]
    InvalidResolution,

    #[error("the core is empty")]
    EmptyCore,

    #[error("region export requires 2 transmitters, got {0}")]
    NotTwoDimensional(usize),

    #[error("domain violation: {0}")]
    DomainViolation(String),
}

impl Error {
    /// True for errors raised when a configuration lies outside the
    /// preconditions of the two-transmitter fair allocation.
    pub fn is_not_covered(&self) -> bool {
        matches!(
            self,
            Error::GainsOutOfRange { .. } | Error::PowerBelowLambda { .. } | Error::NoGammaStar
        )
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }

    /// Variant name, used to tag command-line diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Parse(_) => "Parse",
            Error::NoTransmitters => "NoTransmitters",
            Error::NonPositivePower { .. } => "NonPositivePower",
            Error::NegativeLambda(_) => "NegativeLambda",
            Error::NegativeGain(_) => "NegativeGain",
            Error::GainCountMismatch { .. } => "GainCountMismatch",
            Error::UnsupportedGame(_) => "UnsupportedGame",
            Error::TooManyTransmitters { .. } => "TooManyTransmitters",
            Error::NonPositiveOmega(_) => "NonPositiveOmega",
            Error::WrongGameKind { .. } => "WrongGameKind",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::LambdaNotZero(_) => "LambdaNotZero",
            Error::ZeroGrandValue => "ZeroGrandValue",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::GainsOutOfRange { .. } => "GainsOutOfRange",
            Error::PowerBelowLambda { .. } => "PowerBelowLambda",
            Error::NoGammaStar => "NoGammaStar",
            Error::EqualPowers(..) => "EqualPowers",
            Error::InactiveIndex(_) => "InactiveIndex",
            Error::InvalidPowerAllocation(_) => "InvalidPowerAllocation",
            Error::InvalidResolution => "InvalidResolution",
            Error::EmptyCore => "EmptyCore",
            Error::NotTwoDimensional(_) => "NotTwoDimensional",
            Error::DomainViolation(_) => "DomainViolation",
        }
    }
}
