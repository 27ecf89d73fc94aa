use thiserror::Error;

#[derive(Debug, Error)]
pub enum DdError {
    #[error("regression input: {0}")]
    InvalidInput(String),

    #[error("grid too short: {rows} rows cannot support expansion order {order} (need >= 3x)")]
    GridTooShort { rows: usize, order: usize },

    #[error("non-finite value in the {0}")]
    NonFinite(&'static str),

    #[error(
        "coordinate descent did not converge after {sweeps} sweeps \
         (last coefficient change {last_change:.3e}, residual norm {residual:.6e})"
    )]
    NoConvergence {
        sweeps: usize,
        last_change: f64,
        residual: f64,
    },

    #[error("lambda grid is empty")]
    EmptyLambdaGrid,

    #[error("training data has C(0) = 0; cannot normalize the replay score")]
    ZeroInitialValue,

    #[error(transparent)]
    Gle(#[from] gle_rom::GleError),

    #[error(transparent)]
    Fp(#[from] fp_kernel::FpError),

    #[error(transparent)]
    Mc(#[from] mc_sim::McError),
}
