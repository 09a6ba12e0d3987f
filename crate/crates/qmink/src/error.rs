use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix in {0}")]
    SingularMatrix(&'static str),

    #[error("point lies on the light cone (|y^2| = {0:e})")]
    OnLightCone(f64),

    #[error("matrix is not in the span of the dual basis (residual {0:e})")]
    NotInSpan(f64),

    #[error("point is outside the matrix ball")]
    OutsideDomain,

    #[error("lambda must be an integer greater than 3 (got {0}); the coherent-state map is only defined for integer lambda > 3")]
    InvalidLambda(i64),

    #[error("invalid basis index (2j={two_j}, m={m}, 2j1={two_j1}, 2j2={two_j2})")]
    InvalidIndex {
        two_j: u32,
        m: u32,
        two_j1: i32,
        two_j2: i32,
    },

    #[error("operators built for different truncations or lambda")]
    TruncationMismatch,

    #[error("index of degree {degree} does not fit in max_degree {max_degree}")]
    TruncationTooSmall { degree: u32, max_degree: u32 },

    #[error("change of basis is ill-conditioned (residual {0:e})")]
    IllConditioned(f64),

    #[error("algebra element does not satisfy the {0} invariant")]
    ConventionMismatch(&'static str),

    #[error("group element violates eta-unitarity or unit determinant (defect {0:e})")]
    NotInGroup(f64),

    #[error("projected cost {projected} exceeds budget {limit}")]
    BudgetExceeded { projected: u128, limit: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
