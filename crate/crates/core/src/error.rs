use alloc::string::String;

/// Errors raised by the core routines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("partial quotient a_{index} = {value} is not a positive integer")]
    NonPositiveQuotient { index: usize, value: String },
    #[error("continued fraction needs at least {required} partial quotients after a0, got {actual}")]
    PrefixTooShort { required: usize, actual: usize },
    #[error("invalid step function: {0}")]
    InvalidStep(&'static str),
    #[error("step functions have no common domain")]
    EmptyDomain,
    #[error("exponent window holds {actual} samples, at least {required} needed")]
    WindowTooSmall { required: usize, actual: usize },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("interleaving s_1 < q_1 < s_2 < q_2 < ... fails at index {index}")]
    Interleaving { index: usize },
    #[error("denominator exceeds digit guard of {limit} digits")]
    DigitGuard { limit: u64 },
    #[error("singular matrix: det A = 0")]
    Singular,
    #[error("no nonzero lattice point with sup-norm <= t")]
    EmptyBox,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
