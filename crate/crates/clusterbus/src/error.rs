use crate::geometry::Site;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("site {0} is not a qubit of this lattice")]
    SupportOutOfLattice(Site),
    #[error("marked vertex set has no matching")]
    Infeasible,
    #[error("edge set has nonempty boundary")]
    NotACycle,
    #[error("graph too large for exhaustive search ({edges} edges, limit {limit})")]
    TooLarge { edges: usize, limit: usize },
    #[error("enumeration budget exceeded: {edges} edges > {limit}; pass a length cap")]
    BudgetExceeded { edges: usize, limit: usize },
    #[error("{name}: p = {p} outside validity range p <= {max}")]
    OutOfValidity { name: String, p: f64, max: f64 },
    #[error("residual state is not a Bell basis state")]
    NotBell,
    #[error("unknown bound name `{0}`")]
    UnknownBound(String),
    #[error("cannot parse noise model `{0}`")]
    BadNoise(String),
}

pub type Result<T> = std::result::Result<T, Error>;
