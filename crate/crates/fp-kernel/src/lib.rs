//! First-principle memory-kernel parametrization.
//!
//! Builds series expansions `K(t) = sum_n k_n g_n(t)` of the projected
//! evolution's memory kernel from exact operator cumulants: normalized
//! moments `gamma_n` of the chain generator are computed symbolically
//! (via `poly-algebra`), converted to projected cumulants `mu_n` by a
//! triangular recurrence, and mapped onto a temporal basis (Taylor or a
//! spectral-domain family paired with `exp(-a t) J_n(b t)`).

mod basis;
mod bessel;
mod cumulants;
mod error;
mod model;

pub use basis::{
    faber_polynomial_coefficients, laguerre_basis, laguerre_sequence, BasisSpec,
};
pub use bessel::{bessel_j, bessel_j_sequence};
pub use cumulants::{
    gamma_coefficients, gamma_coefficients_with, mu_from_gamma, mu_from_gamma_matrix,
    streaming_coefficient,
};
pub use error::FpError;
pub use model::{kernel_from_mu, KernelModel};
