use thiserror::Error;

use crate::exactalg::Var;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable {0} has no assigned value")]
    UnboundVariable(Var),
    #[error("constant term is not an invertible rational (or not 1 where 1 is required)")]
    NonUnitConstantTerm,
    #[error("constant term must be zero")]
    NonzeroConstantTerm,
    #[error("index {requested} exceeds truncation order {order}")]
    OrderExceeded { requested: usize, order: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("provider cannot be sampled: {0}")]
    UnsamplableProvider(String),
    #[error("moment {0} is not available from this provider")]
    MomentUnavailable(usize),
    #[error("unknown identity: {0}")]
    UnknownIdentity(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
