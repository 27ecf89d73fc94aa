//! Projected evolution equations and reduced-order surrogates.
//!
//! Three pieces: a Volterra integro-differential solver for the projected
//! correlation equation `C' = Omega C + K * C` (third-order multistep with
//! an end-corrected trapezoid convolution), a Karhunen-Loeve spectral model
//! of a stationary covariance for generating Gaussian fluctuation forces,
//! and the forced reduced-order integrator that combines both into
//! surrogate trajectory ensembles.

mod error;
mod kl;
mod rom;
mod volterra;

pub use error::GleError;
pub use kl::{kl_decompose, sample_fluctuation, KLModel};
pub use rom::{run_rom, InitialValueSampler};
pub use volterra::{solve_projected_gle, solve_projected_gle_matrix, TimeGrid};
