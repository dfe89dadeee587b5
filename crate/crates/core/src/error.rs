use thiserror::Error;

use crate::group::CAP_ENV;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every analysis. All variants except
/// [`Error::Internal`] describe bad input rather than bugs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("group order {order} exceeds the configured cap {cap} (raise it with {CAP_ENV})")]
    OrderCap { order: u64, cap: usize },
    #[error("table fails the group axioms: {0}")]
    InvalidTable(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("not normal: {0}")]
    NotNormal(String),
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("not a character: {0}")]
    NotCharacter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("contradictory assertion: {0}")]
    Contradiction(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }

    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownConstructor(_) => "unknown_constructor",
            Error::Parameter(_) => "parameter",
            Error::OrderCap { .. } => "order_cap",
            Error::InvalidTable(_) => "invalid_table",
            Error::SearchExhausted(_) => "search_exhausted",
            Error::NotSubgroup(_) => "not_subgroup",
            Error::NotNormal(_) => "not_normal",
            Error::NotAutomorphism(_) => "not_automorphism",
            Error::GroupMismatch(_) => "group_mismatch",
            Error::NotCharacter(_) => "not_character",
            Error::Precondition(_) => "precondition",
            Error::Contradiction(_) => "contradiction",
            Error::Internal(_) => "internal",
        }
    }
}
