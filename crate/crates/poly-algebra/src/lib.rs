//! Exact polynomial algebra for stochastic oscillator chains.
//!
//! The crate carries the symbolic layer of the toolkit: sparse multivariate
//! polynomials over the chain phase-space variables `(r_j, p_j)`, the
//! backward Kolmogorov operator of the damped chain and its equilibrium
//! adjoint applied symbolically, and exact expectations under the factorized
//! Gibbs measure. Everything here is deterministic and exact up to
//! quadrature tolerance; the Monte-Carlo side lives in `mc-sim`.

mod chain;
mod error;
mod gibbs;
mod kolmogorov;
mod monomial;
mod poly;
mod quadrature;

pub use chain::{BathSpec, ChainSpec, ModelKind};
pub use error::PolyError;
pub use gibbs::{gibbs_expectation, GibbsMeasure, NeumaierSum};
pub use kolmogorov::{
    apply_kolmogorov, apply_kolmogorov_capped, kolmogorov_power, monomial_degree_window,
    Direction, DEFAULT_MAX_TOTAL_DEGREE,
};
pub use monomial::{Monomial, Var};
pub use poly::SparsePoly;
pub use quadrature::adaptive_simpson;
