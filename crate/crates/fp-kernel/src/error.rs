use thiserror::Error;

#[derive(Debug, Error)]
pub enum FpError {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("observable has zero norm under the equilibrium measure")]
    DegenerateObservable,

    #[error("need at least {needed} projected cumulants, got {got}")]
    InsufficientCumulants { needed: usize, got: usize },

    #[error("first-principle mapping is not defined for the {0} basis")]
    UnsupportedBasis(&'static str),

    #[error("matrix cumulants must share one square dimension; entry {index} is {rows}x{cols}, expected {expected}x{expected}")]
    DimensionMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("non-finite kernel coefficient at position {0}")]
    NonFiniteCoefficient(usize),

    #[error(transparent)]
    Poly(#[from] poly_algebra::PolyError),

    #[error("kernel model file: {0}")]
    Io(#[from] std::io::Error),

    #[error("kernel model parse: {0}")]
    Parse(String),
}
