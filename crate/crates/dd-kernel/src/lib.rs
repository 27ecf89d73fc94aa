//! Data-driven memory-kernel parametrization.
//!
//! Builds the Volterra regression of a sampled correlation function against
//! a temporal dictionary (Laguerre functions by default, the spectral-domain
//! family as an alternative), solves it by LASSO coordinate descent across a
//! regularization grid, and selects the winner by replaying the projected
//! evolution equation against the training data.

mod error;
mod fit;
mod lasso;
mod regression;

pub use error::DdError;
pub use fit::{fit_kernel_dd, FitReport, LambdaReport};
pub use lasso::{kkt_residual, lambda_max, lasso_fit, lasso_fit_warm, soft_threshold};
pub use regression::{assemble_regression, Regression};

// The Laguerre dictionary primitive lives next to the other basis
// evaluations; re-exported here as part of this crate's surface.
pub use fp_kernel::{laguerre_basis, laguerre_sequence};
