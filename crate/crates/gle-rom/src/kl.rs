use std::fmt::Write as _;
use std::path::Path;

use mc_sim::SampledFunction;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;

use crate::error::GleError;

/// Eigenvalues below `-threshold * lambda_max` fail the positivity check;
/// anything between there and zero is clipped.
const PSD_TOLERANCE: f64 = 1e-8;

/// Truncated spectral model of a stationary covariance on `[0, T]`:
/// eigenpairs of the covariance integral operator, discretized on a uniform
/// grid with trapezoid weights.
#[derive(Clone, Debug, PartialEq)]
pub struct KLModel {
    dt: f64,
    n_grid: usize,
    eigenvalues: Vec<f64>,
    /// Mode functions sampled on the grid, row per mode.
    modes: Vec<Vec<f64>>,
}

impl KLModel {
    /// Validating constructor: ordering, nonnegativity (tiny negatives are
    /// clipped, worse is an error), orthonormality under the quadrature
    /// weights to 1e-8.
    pub fn new(
        dt: f64,
        n_grid: usize,
        mut eigenvalues: Vec<f64>,
        modes: Vec<Vec<f64>>,
    ) -> Result<Self, GleError> {
        if !dt.is_finite() || dt <= 0.0 || n_grid < 2 {
            return Err(GleError::InvalidInput(format!(
                "mode grid needs dt > 0 and at least 2 points, got dt={dt}, n={n_grid}"
            )));
        }
        if eigenvalues.len() != modes.len() {
            return Err(GleError::InvalidInput(format!(
                "{} eigenvalues vs {} mode rows",
                eigenvalues.len(),
                modes.len()
            )));
        }
        if modes.iter().any(|m| m.len() != n_grid) {
            return Err(GleError::InvalidInput("mode row length mismatch".into()));
        }
        let lambda_max = eigenvalues.first().copied().unwrap_or(0.0);
        for w in eigenvalues.windows(2) {
            if w[1] > w[0] {
                return Err(GleError::InvalidInput(
                    "eigenvalues must be non-increasing".into(),
                ));
            }
        }
        for l in eigenvalues.iter_mut() {
            if *l < -1e-10 * lambda_max.max(1e-300) {
                return Err(GleError::CovarianceNotPsd {
                    min_eig: *l,
                    max_eig: lambda_max,
                });
            }
            if *l < 0.0 {
                *l = 0.0;
            }
        }
        let model = KLModel {
            dt,
            n_grid,
            eigenvalues,
            modes,
        };
        model.check_orthonormal(1e-8)?;
        Ok(model)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_grid(&self) -> usize {
        self.n_grid
    }

    pub fn horizon(&self) -> f64 {
        self.dt * (self.n_grid - 1) as f64
    }

    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn mode(&self, k: usize) -> &[f64] {
        &self.modes[k]
    }

    fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.n_grid, self.dt)
    }

    /// `sum_i w_i e_a(t_i) e_b(t_i) = delta_ab` within `tol`.
    pub fn check_orthonormal(&self, tol: f64) -> Result<(), GleError> {
        let w = self.weights();
        for a in 0..self.n_modes() {
            for b in a..self.n_modes() {
                let dot: f64 = (0..self.n_grid)
                    .map(|i| w[i] * self.modes[a][i] * self.modes[b][i])
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                if (dot - expect).abs() > tol {
                    return Err(GleError::InvalidInput(format!(
                        "modes {a},{b} not orthonormal: <e_a, e_b> = {dot}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Covariance implied by the truncation, `sum_k lambda_k e_k(s) e_k(t)`.
    pub fn reconstructed_covariance(&self, i: usize, j: usize) -> f64 {
        (0..self.n_modes())
            .map(|k| self.eigenvalues[k] * self.modes[k][i] * self.modes[k][j])
            .sum()
    }

    /// Structured text form with full-precision numbers.
    pub fn to_toml_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dt = {:.17e}", self.dt);
        let _ = writeln!(s, "n_grid = {}", self.n_grid);
        s.push_str("eigenvalues = [\n");
        for l in &self.eigenvalues {
            let _ = writeln!(s, "  {l:.17e},");
        }
        s.push_str("]\nmodes = [\n");
        for row in &self.modes {
            s.push_str("  [");
            for v in row {
                let _ = write!(s, "{v:.17e},");
            }
            s.push_str("],\n");
        }
        s.push_str("]\n");
        s
    }

    pub fn from_toml_str(text: &str) -> Result<Self, GleError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            dt: f64,
            n_grid: usize,
            eigenvalues: Vec<f64>,
            modes: Vec<Vec<f64>>,
        }
        let raw: Raw = toml::from_str(text).map_err(|e| GleError::Parse(e.to_string()))?;
        KLModel::new(raw.dt, raw.n_grid, raw.eigenvalues, raw.modes)
    }

    pub fn save(&self, path: &Path) -> Result<(), GleError> {
        std::fs::write(path, self.to_toml_string())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, GleError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

fn trapezoid_weights(n: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![dt; n];
    w[0] = 0.5 * dt;
    w[n - 1] = 0.5 * dt;
    w
}

/// Solves the homogeneous second-kind eigenproblem of the stationary
/// covariance `cov(|t - s|)` on the grid of `cov` and keeps the leading
/// `modes` eigenpairs.
///
/// Discretization: collocation with trapezoid weights `w`, symmetrized as
/// `D^{1/2} C D^{1/2}` (`D = diag(w)`) so a symmetric eigensolver applies;
/// mode functions are mapped back through `D^{-1/2}`, which leaves them
/// exactly orthonormal under the quadrature inner product.
pub fn kl_decompose(cov: &SampledFunction, modes: usize) -> Result<KLModel, GleError> {
    let n = cov.len();
    if n < 2 {
        return Err(GleError::GridTooCoarse(
            "covariance needs at least two samples".into(),
        ));
    }
    if modes > n {
        return Err(GleError::GridTooCoarse(format!(
            "{modes} modes requested from an {n}-point grid"
        )));
    }
    let dt = cov.dt();
    let w = trapezoid_weights(n, dt);
    let sqrt_w: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let values = cov.values();
    let b = DMatrix::from_fn(n, n, |i, j| {
        let lag = i.abs_diff(j);
        sqrt_w[i] * values[lag] * sqrt_w[j]
    });
    let eigen = nalgebra::SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));

    let lambda_max = eigen.eigenvalues[order[0]].max(0.0);
    let min_eig = eigen.eigenvalues[order[n - 1]];
    if min_eig < -PSD_TOLERANCE * lambda_max.max(1e-300) {
        return Err(GleError::CovarianceNotPsd {
            min_eig,
            max_eig: lambda_max,
        });
    }

    let mut eigenvalues = Vec::with_capacity(modes);
    let mut mode_rows = Vec::with_capacity(modes);
    for &idx in order.iter().take(modes) {
        eigenvalues.push(eigen.eigenvalues[idx].max(0.0));
        let v = eigen.eigenvectors.column(idx);
        mode_rows.push((0..n).map(|i| v[i] / sqrt_w[i]).collect());
    }
    KLModel::new(dt, n, eigenvalues, mode_rows)
}

/// Draws one zero-mean Gaussian path `f(t) = sum_k eta_k sqrt(lambda_k)
/// e_k(t)` with `eta_k` i.i.d. standard normal.
pub fn sample_fluctuation(kl: &KLModel, rng: &mut impl Rng) -> SampledFunction {
    let mut values = vec![0.0f64; kl.n_grid()];
    for k in 0..kl.n_modes() {
        let eta: f64 = rng.sample(StandardNormal);
        let amp = eta * kl.eigenvalues()[k].sqrt();
        for (slot, &e) in values.iter_mut().zip(kl.mode(k)) {
            *slot += amp * e;
        }
    }
    SampledFunction::new(0.0, kl.dt(), values).expect("finite by construction")
}
