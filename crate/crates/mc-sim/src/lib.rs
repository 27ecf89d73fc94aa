//! Monte-Carlo simulation of stochastic oscillator chains and the ensemble
//! statistics built on top of it.
//!
//! Two models are integrated: the periodic damped chain in bond coordinates
//! (BAOAB splitting with an exact thermostat substep) and an open chain
//! coupled to two Ornstein-Uhlenbeck heat baths (Euler-Maruyama). Ensembles
//! run path-parallel with one counter-derived RNG stream per path, so a
//! fixed master seed reproduces results bit-for-bit at any worker count.

mod decay;
mod ensemble;
mod error;
mod fpu;
mod heat;
mod kde;
mod observable;
mod sampled;
mod state;
mod stats;

pub use decay::{fit_exponential_bound, DecayFit};
pub use ensemble::{
    path_rng, simulate_ensemble, EnsembleSpec, InitialCondition, StoreFormat, TrajectoryStore,
};
pub use error::McError;
pub use fpu::{fpu_energy, sample_gibbs_initial, FpuStepper};
pub use heat::HeatStepper;
pub use kde::{kde_marginal, ks_distance, KDE_GRID};
pub use observable::Observable;
pub use sampled::SampledFunction;
pub use state::ChainState;
pub use stats::{
    autocorrelation, autocorrelation_time_averaged, mean, nonequilibrium_mean, pairwise_sum,
    variance, AcfEstimate, AcfEstimator, NeqMeanEstimate,
};
