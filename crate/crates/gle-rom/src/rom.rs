use fp_kernel::KernelModel;
use mc_sim::{path_rng, EnsembleSpec, Observable, SampledFunction, TrajectoryStore};
use poly_algebra::ChainSpec;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::GleError;
use crate::kl::{sample_fluctuation, KLModel};
use crate::volterra::{volterra_scalar, TimeGrid};

/// How reduced-order paths draw their initial value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialValueSampler {
    /// Zero-mean Gaussian with the stationary variance of the observable.
    StationaryGaussian { variance: f64 },
    /// Fixed starting value (deterministic runs, debugging).
    Fixed(f64),
}

/// Integrates an ensemble of reduced-order sample paths
/// `du/dt = Omega u + int_0^t K(t-s) u(s) ds + f(t)`, with `f` drawn per
/// path from the fluctuation model, and stores them in the common
/// trajectory-store format so every statistics operation applies.
///
/// `chain` records the provenance (which physical model the surrogate
/// stands for); `observable` labels the stored series. The run grid must
/// match the fluctuation model's grid spacing, and the horizon may not
/// exceed the model's.
pub fn run_rom(
    kernel: &KernelModel,
    kl: &KLModel,
    u0_sampler: InitialValueSampler,
    chain: &ChainSpec,
    observable: Observable,
    ens: &EnsembleSpec,
) -> Result<TrajectoryStore, GleError> {
    ens.validate()?;
    let n_steps = ens.n_steps();
    let grid = TimeGrid::new(ens.dt, n_steps)?;
    if grid.t_end() > kl.horizon() + 1e-9 * ens.dt {
        return Err(GleError::HorizonExceeded {
            t_end: grid.t_end(),
            horizon: kl.horizon(),
        });
    }
    if ((kl.dt() - ens.dt) / ens.dt).abs() > 1e-9 {
        return Err(GleError::GridMismatch(format!(
            "fluctuation model dt = {}, run dt = {}",
            kl.dt(),
            ens.dt
        )));
    }

    let n_saved = ens.n_saved();
    let mut data = vec![0.0f64; ens.paths * n_saved];
    let results: Vec<Result<(), GleError>> = data
        .par_chunks_mut(n_saved)
        .enumerate()
        .map(|(path, row)| {
            let mut rng = path_rng(ens.seed, path);
            let u0 = match u0_sampler {
                InitialValueSampler::StationaryGaussian { variance } => {
                    variance.sqrt() * rng.sample::<f64, _>(StandardNormal)
                }
                InitialValueSampler::Fixed(v) => v,
            };
            let forcing = sample_fluctuation(kl, &mut rng);
            let values = integrate_path(kernel, &forcing, u0, &grid)?;
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = values[k * ens.save_every];
            }
            Ok(())
        })
        .collect();
    for r in results {
        r?;
    }
    Ok(TrajectoryStore::from_paths(
        chain.clone(),
        ens.clone(),
        vec![observable],
        data,
    )?)
}

/// One forced path on the full step grid.
pub(crate) fn integrate_path(
    kernel: &KernelModel,
    forcing: &SampledFunction,
    u0: f64,
    grid: &TimeGrid,
) -> Result<Vec<f64>, GleError> {
    let dt = grid.dt;
    let forcing_at = |t: f64| -> f64 {
        // Linear interpolation covers the bootstrap's half-substeps; at the
        // whole grid points it returns stored samples exactly.
        let x = t / dt;
        let i = (x.floor() as usize).min(forcing.len() - 1);
        let frac = x - i as f64;
        if frac <= 1e-12 || i + 1 >= forcing.len() {
            forcing.values()[i]
        } else {
            (1.0 - frac) * forcing.values()[i] + frac * forcing.values()[i + 1]
        }
    };
    volterra_scalar(kernel.omega, &|t| kernel.evaluate(t), &forcing_at, u0, grid)
}
