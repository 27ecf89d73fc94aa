use thiserror::Error;

use crate::monomial::Var;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("invalid chain specification: {0}")]
    InvalidSpec(String),

    #[error("variable {var} is outside the universe of a {n_sites}-site chain")]
    UnknownVariable { var: Var, n_sites: usize },

    #[error("total degree {degree} exceeds the configured maximum {cap}")]
    DegreeOverflow { degree: u32, cap: u32 },

    #[error("operation requires the {required} model, got {got}")]
    UnsupportedModel {
        required: &'static str,
        got: &'static str,
    },

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
}

impl PolyError {
    pub(crate) fn unknown_var(var: Var, n_sites: usize) -> Self {
        PolyError::UnknownVariable { var, n_sites }
    }
}
