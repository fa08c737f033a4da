use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("field order {0} is outside the supported range")]
    FieldTooLarge(u64),

    #[error("leading coefficient {coefficient} is not invertible")]
    NonInvertibleLead { coefficient: String },

    #[error("element is not invertible: character block {block} has all coefficients in the maximal ideal")]
    NotInvertible { block: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("module is not free over the group ring: {0}")]
    NotFree(String),

    #[error("prime {prime} divides a structural denominator")]
    BadPrime { prime: String },

    #[error("prime {prime} is ramified")]
    Ramified { prime: String },

    #[error("t-module invariant (A_0 - theta I)^n = 0 fails")]
    NotTModule,

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("convergence could not be certified: tail valuation bound {achieved} does not exceed {target}")]
    Convergence { achieved: i64, target: i64 },

    #[error("no nucleus found within tower depth {depth}")]
    NoNucleus { depth: usize },

    #[error("lattice is not stable under tau: {0}")]
    NotTauStable(String),

    #[error("precision {precision} is insufficient: {reason}")]
    Precision { precision: i64, reason: String },

    #[error("work budget exceeded: {needed} primes required, budget is {budget}")]
    WorkBudget { needed: u128, budget: u128 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
