use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `B_1` is not determined by `-u/sinh u`: its coefficient `2^1 - 2` vanishes.
    #[error("B_1 is undefined under the sinh convention (its coefficient 2^1 - 2 is zero)")]
    BernoulliUndefined,

    #[error("series has a non-unit constant term and cannot be inverted")]
    NonUnit,

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("coefficient of degree {requested:?} requested beyond truncation {order:?}")]
    BeyondTruncation {
        requested: (usize, usize),
        order: (usize, usize),
    },

    #[error("pole not cancelled: coefficient {index} of {what} is nonzero")]
    PoleNotCancelled { what: &'static str, index: usize },

    #[error("degree constraint violated: {0}")]
    Degree(String),

    #[error("invalid parameters: {0}")]
    Invalid(String),

    #[error("localization total has a nonzero irrational part")]
    NotRational,
}
