use fp_kernel::{BasisSpec, KernelModel};
use gle_rom::{solve_projected_gle, TimeGrid};
use mc_sim::SampledFunction;

use crate::error::DdError;
use crate::lasso::{kkt_residual, lasso_fit_warm};
use crate::regression::{assemble_regression, Regression};

/// Fit diagnostics for one regularization strength.
#[derive(Clone, Debug)]
pub struct LambdaReport {
    pub lambda: f64,
    /// Replay validation score `||C_model - C||_inf / |C(0)|`.
    pub replay_error: f64,
    /// Root-mean-square regression residual.
    pub residual_rms: f64,
    /// Largest violation of the subgradient optimality conditions.
    pub kkt_residual: f64,
    pub nonzeros: usize,
    /// Whether coordinate descent converged; a stalled member is
    /// disqualified from selection but stays in the report.
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct FitReport {
    pub entries: Vec<LambdaReport>,
    /// Index of the selected entry.
    pub chosen: usize,
}

impl FitReport {
    pub fn chosen_entry(&self) -> &LambdaReport {
        &self.entries[self.chosen]
    }
}

/// Data-driven kernel fit: assembles the Volterra regression once, walks
/// the regularization path from the strongest penalty down with warm
/// starts, and selects the winner by replaying the projected evolution
/// equation against the training correlation function
/// (`||C_model - C||_inf / |C(0)|`).
///
/// Rows of the regression are serially correlated, so the replay score is
/// the model-selection metric rather than any cross-validation split.
pub fn fit_kernel_dd(
    c: &SampledFunction,
    omega: f64,
    basis: &BasisSpec,
    order: usize,
    lambda_grid: &[f64],
    observable: &str,
) -> Result<(KernelModel, FitReport), DdError> {
    if lambda_grid.is_empty() {
        return Err(DdError::EmptyLambdaGrid);
    }
    let c0 = c.first();
    if c0 == 0.0 {
        return Err(DdError::ZeroInitialValue);
    }
    let regression = assemble_regression(c, omega, basis, order, None)?;

    // Descending-lambda order for the warm-started path; reports keep the
    // caller's grid order.
    let mut order_idx: Vec<usize> = (0..lambda_grid.len()).collect();
    order_idx.sort_by(|&a, &b| lambda_grid[b].total_cmp(&lambda_grid[a]));

    let mut entries: Vec<Option<LambdaReport>> = vec![None; lambda_grid.len()];
    let mut fits: Vec<Option<Vec<f64>>> = vec![None; lambda_grid.len()];
    let mut warm: Option<Vec<f64>> = None;
    let mut first_failure: Option<DdError> = None;
    for &idx in &order_idx {
        let lambda = lambda_grid[idx];
        match score_lambda(&regression, c, omega, basis, lambda, c0, warm.as_deref()) {
            Ok((coeffs, report)) => {
                warm = Some(coeffs.clone());
                entries[idx] = Some(report);
                fits[idx] = Some(coeffs);
            }
            // A stalled member is disqualified, not fatal; the error
            // surfaces only if every member stalls.
            Err(e @ DdError::NoConvergence { .. }) => {
                entries[idx] = Some(LambdaReport {
                    lambda,
                    replay_error: f64::INFINITY,
                    residual_rms: f64::NAN,
                    kkt_residual: f64::NAN,
                    nonzeros: 0,
                    converged: false,
                });
                fits[idx] = Some(Vec::new());
                first_failure.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    let entries: Vec<LambdaReport> = entries.into_iter().map(Option::unwrap).collect();
    let chosen = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.converged)
        .min_by(|(_, a), (_, b)| a.replay_error.total_cmp(&b.replay_error))
        .map(|(i, _)| i);
    let Some(chosen) = chosen else {
        return Err(first_failure.expect("all members disqualified implies a stored failure"));
    };
    let coeffs = fits[chosen].take().expect("fit stored for every entry");
    let model = KernelModel::new(omega, basis.clone(), coeffs, observable)?;
    Ok((model, FitReport { entries, chosen }))
}

#[allow(clippy::too_many_arguments)]
fn score_lambda(
    regression: &Regression,
    c: &SampledFunction,
    omega: f64,
    basis: &BasisSpec,
    lambda: f64,
    c0: f64,
    warm: Option<&[f64]>,
) -> Result<(Vec<f64>, LambdaReport), DdError> {
    let coeffs = lasso_fit_warm(&regression.columns, &regression.target, lambda, warm)?;
    let kkt = kkt_residual(&regression.columns, &regression.target, &coeffs, lambda);
    let model = KernelModel::new(omega, basis.clone(), coeffs.clone(), "")?;
    let grid = TimeGrid::new(c.dt(), c.len() - 1).map_err(DdError::Gle)?;
    let replay_error = match solve_projected_gle(&model, c0, &grid) {
        Ok(replay) => replay.sup_distance(c) / c0.abs(),
        // An unstable replay disqualifies the candidate without failing
        // the whole grid search.
        Err(gle_rom::GleError::Instability { .. }) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };
    let rows = regression.rows() as f64;
    let mut residual_sq = 0.0;
    for i in 0..regression.rows() {
        let mut pred = 0.0;
        for (col, k) in regression.columns.iter().zip(&coeffs) {
            pred += col[i] * k;
        }
        residual_sq += (regression.target[i] - pred).powi(2);
    }
    let report = LambdaReport {
        lambda,
        replay_error,
        residual_rms: (residual_sq / rows).sqrt(),
        kkt_residual: kkt,
        nonzeros: coeffs.iter().filter(|&&k| k != 0.0).count(),
        converged: true,
    };
    Ok((coeffs, report))
}
