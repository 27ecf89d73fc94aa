use fp_kernel::BasisSpec;
use mc_sim::SampledFunction;
use rayon::prelude::*;

use crate::error::DdError;

/// The linear system of the kernel regression: target
/// `y_i = C'(t_i) - Omega C(t_i)` against columns
/// `X_{i,n} = int_0^{t_i} phi_n(s) C(t_i - s) ds`.
#[derive(Clone, Debug)]
pub struct Regression {
    /// Column-major design: `columns[n][i] = X_{i,n}`.
    pub columns: Vec<Vec<f64>>,
    pub target: Vec<f64>,
    pub dt: f64,
}

impl Regression {
    pub fn rows(&self) -> usize {
        self.target.len()
    }

    /// `max_i |y_i - (X k)_i|`.
    pub fn sup_residual(&self, coeffs: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows() {
            let mut pred = 0.0;
            for (col, k) in self.columns.iter().zip(coeffs) {
                pred += col[i] * k;
            }
            worst = worst.max((self.target[i] - pred).abs());
        }
        worst
    }
}

/// Assembles the Volterra regression from a sampled correlation function.
///
/// The derivative uses fourth-order central differences with one-sided
/// stencils at the boundary rows (that error floor carries into the
/// target); the memory integral uses the composite trapezoid rule on the
/// sample grid. An optional exponential row weight `exp(-rate t / 2)`
/// realizes a weighted-norm fit.
pub fn assemble_regression(
    c: &SampledFunction,
    omega: f64,
    basis: &BasisSpec,
    order: usize,
    row_weight_rate: Option<f64>,
) -> Result<Regression, DdError> {
    basis.validate()?;
    let rows = c.len();
    if rows < 5 {
        return Err(DdError::InvalidInput(format!(
            "need at least 5 samples for the derivative stencils, got {rows}"
        )));
    }
    if rows < 3 * (order + 1) {
        return Err(DdError::GridTooShort { rows, order });
    }
    let dt = c.dt();
    let v = c.values();

    let deriv = fourth_order_derivative(v, dt);
    let mut target: Vec<f64> = (0..rows).map(|i| deriv[i] - omega * v[i]).collect();

    // Basis values on the grid, shared by every row.
    let basis_rows: Vec<Vec<f64>> = (0..rows)
        .map(|k| basis.eval_sequence(order, dt * k as f64))
        .collect();

    let mut columns = vec![vec![0.0f64; rows]; order + 1];
    let column_entries: Vec<Vec<f64>> = (0..rows)
        .into_par_iter()
        .map(|i| {
            // X_{i,n} = int_0^{t_i} phi_n(s) C(t_i - s) ds, trapezoid in s.
            let mut row = vec![0.0f64; order + 1];
            if i == 0 {
                return row;
            }
            for (n, slot) in row.iter_mut().enumerate() {
                let mut acc = 0.5 * (basis_rows[0][n] * v[i] + basis_rows[i][n] * v[0]);
                for j in 1..i {
                    acc += basis_rows[j][n] * v[i - j];
                }
                *slot = acc * dt;
            }
            row
        })
        .collect();
    for (i, row) in column_entries.iter().enumerate() {
        for (n, &x) in row.iter().enumerate() {
            columns[n][i] = x;
        }
    }

    if let Some(rate) = row_weight_rate {
        for i in 0..rows {
            let w = (-0.5 * rate * dt * i as f64).exp().sqrt();
            target[i] *= w;
            for col in columns.iter_mut() {
                col[i] *= w;
            }
        }
    }

    if target.iter().any(|x| !x.is_finite())
        || columns.iter().flatten().any(|x| !x.is_finite())
    {
        return Err(DdError::NonFinite("assembled regression"));
    }
    Ok(Regression {
        columns,
        target,
        dt,
    })
}

fn fourth_order_derivative(v: &[f64], dt: f64) -> Vec<f64> {
    let n = v.len();
    let h12 = 12.0 * dt;
    let mut d = vec![0.0f64; n];
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / h12;
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / h12;
    for i in 2..n - 2 {
        d[i] = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / h12;
    }
    d[n - 2] = (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4]
        - v[n - 5])
        / h12;
    d[n - 1] = (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4]
        + 3.0 * v[n - 5])
        / h12;
    d
}
