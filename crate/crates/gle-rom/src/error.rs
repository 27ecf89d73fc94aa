use thiserror::Error;

#[derive(Debug, Error)]
pub enum GleError {
    #[error("invalid solver input: {0}")]
    InvalidInput(String),

    #[error("solution blew up at t = {time:.6} (|value| = {magnitude:.3e} exceeds {limit:.3e})")]
    Instability {
        time: f64,
        magnitude: f64,
        limit: f64,
    },

    #[error(
        "covariance is not positive semidefinite: most negative eigenvalue {min_eig:.3e} \
         against leading {max_eig:.3e}; unsuitable for a Gaussian mode expansion"
    )]
    CovarianceNotPsd { min_eig: f64, max_eig: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("fluctuation model grid mismatch: {0}")]
    GridMismatch(String),

    #[error("run horizon {t_end} exceeds the fluctuation model horizon {horizon}")]
    HorizonExceeded { t_end: f64, horizon: f64 },

    #[error(transparent)]
    Mc(#[from] mc_sim::McError),

    #[error("model file: {0}")]
    Io(#[from] std::io::Error),

    #[error("model parse: {0}")]
    Parse(String),
}
