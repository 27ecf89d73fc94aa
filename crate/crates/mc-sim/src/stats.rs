use serde::{Deserialize, Serialize};

use crate::decay::{fit_exponential_bound, DecayFit};
use crate::ensemble::TrajectoryStore;
use crate::error::McError;
use crate::observable::Observable;
use crate::sampled::SampledFunction;

/// Order-insensitive sum: pairwise reduction keeps the result stable to a
/// few ulps no matter how the inputs were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Sample variance (denominator `n - 1`).
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|&x| (x - m) * (x - m)).collect();
    pairwise_sum(&sq) / (xs.len() as f64 - 1.0)
}

/// Which autocorrelation estimator produced a [`AcfEstimate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcfEstimator {
    /// `C(t_k) = mean over paths of u(t_k) u(0)`; matches the ensemble
    /// definition exactly.
    CrossPath,
    /// Additional averaging over lagged time origins (variance reduction;
    /// assumes stationarity beyond the ensemble definition).
    TimeAveraged { origins: usize },
}

/// An estimated autocorrelation function with per-lag standard errors.
#[derive(Clone, Debug)]
pub struct AcfEstimate {
    pub acf: SampledFunction,
    pub stderr: Vec<f64>,
    pub estimator: AcfEstimator,
}

impl AcfEstimate {
    /// `C(t)/C(0)` with errors propagated through the normalization.
    pub fn normalized(&self) -> Result<AcfEstimate, McError> {
        let c0 = self.acf.first();
        if c0 == 0.0 {
            return Err(McError::InvalidSampledFunction(
                "cannot normalize: C(0) = 0".into(),
            ));
        }
        Ok(AcfEstimate {
            acf: self.acf.map(|v| v / c0)?,
            stderr: self.stderr.iter().map(|s| s / c0.abs()).collect(),
            estimator: self.estimator,
        })
    }
}

/// Cross-path stationary autocorrelation
/// `C(t_k) = (1/paths) sum_paths u(t_k) u(0)`.
pub fn autocorrelation(store: &TrajectoryStore, obs: &Observable) -> Result<AcfEstimate, McError> {
    let oi = store
        .observable_index(obs)
        .ok_or(McError::EmptyStore)?;
    let paths = store.paths();
    if paths == 0 {
        return Err(McError::EmptyStore);
    }
    let nt = store.n_saved();
    let mut acf = Vec::with_capacity(nt);
    let mut stderr = Vec::with_capacity(nt);
    let mut products = vec![0.0; paths];
    for k in 0..nt {
        for (p, slot) in products.iter_mut().enumerate() {
            let series = store.series(p, oi);
            *slot = series[k] * series[0];
        }
        let m = mean(&products);
        acf.push(m);
        let err = if paths > 1 {
            (variance(&products) / paths as f64).sqrt()
        } else {
            0.0
        };
        stderr.push(err);
    }
    Ok(AcfEstimate {
        acf: SampledFunction::new(0.0, store.dt_saved(), acf)?,
        stderr,
        estimator: AcfEstimator::CrossPath,
    })
}

/// Cross-path estimator refined by averaging over `origins` lagged time
/// origins; valid for stationary-start ensembles and flagged as such in the
/// estimator metadata.
pub fn autocorrelation_time_averaged(
    store: &TrajectoryStore,
    obs: &Observable,
    origins: usize,
) -> Result<AcfEstimate, McError> {
    let oi = store.observable_index(obs).ok_or(McError::EmptyStore)?;
    let paths = store.paths();
    let nt = store.n_saved();
    let origins = origins.max(1).min(nt);
    let max_lag = nt - origins;
    let mut acf = Vec::with_capacity(max_lag + 1);
    let mut stderr = Vec::with_capacity(max_lag + 1);
    let mut per_path = vec![0.0; paths];
    for k in 0..=max_lag {
        for (p, slot) in per_path.iter_mut().enumerate() {
            let series = store.series(p, oi);
            let mut acc = 0.0;
            for o in 0..origins {
                acc += series[o + k] * series[o];
            }
            *slot = acc / origins as f64;
        }
        acf.push(mean(&per_path));
        let err = if paths > 1 {
            (variance(&per_path) / paths as f64).sqrt()
        } else {
            0.0
        };
        stderr.push(err);
    }
    Ok(AcfEstimate {
        acf: SampledFunction::new(0.0, store.dt_saved(), acf)?,
        stderr,
        estimator: AcfEstimator::TimeAveraged { origins },
    })
}

/// Ensemble mean trajectory with standard errors and, where it decays, an
/// exponential envelope fit of the approach to the long-time value.
#[derive(Clone, Debug)]
pub struct NeqMeanEstimate {
    pub mean: SampledFunction,
    pub stderr: Vec<f64>,
    /// Long-time value estimated from the trailing tenth of the window.
    pub tail_value: f64,
    /// Envelope fit of `|M(t) - tail|`, when one exists.
    pub decay: Option<DecayFit>,
}

/// Mean of an observable over a (generally nonequilibrium) ensemble.
pub fn nonequilibrium_mean(
    store: &TrajectoryStore,
    obs: &Observable,
) -> Result<NeqMeanEstimate, McError> {
    let oi = store.observable_index(obs).ok_or(McError::EmptyStore)?;
    let paths = store.paths();
    let nt = store.n_saved();
    let mut means = Vec::with_capacity(nt);
    let mut stderr = Vec::with_capacity(nt);
    let mut column = vec![0.0; paths];
    for k in 0..nt {
        for (p, slot) in column.iter_mut().enumerate() {
            *slot = store.series(p, oi)[k];
        }
        means.push(mean(&column));
        stderr.push(if paths > 1 {
            (variance(&column) / paths as f64).sqrt()
        } else {
            0.0
        });
    }
    let tail_start = nt - (nt / 10).max(1);
    let tail_value = mean(&means[tail_start..]);
    let mean_fn = SampledFunction::new(0.0, store.dt_saved(), means)?;
    let centered = mean_fn.map(|v| v - tail_value)?;
    let decay = match centered.values().iter().any(|v| v.abs() > 0.0) {
        true => fit_exponential_bound(&centered, 10.0).ok(),
        false => None,
    };
    Ok(NeqMeanEstimate {
        mean: mean_fn,
        stderr,
        tail_value,
        decay,
    })
}
