use nalgebra::DMatrix;
use poly_algebra::{
    apply_kolmogorov, ChainSpec, Direction, GibbsMeasure, PolyError, SparsePoly,
};

use crate::error::FpError;

/// Normalized operator moments `gamma_n = <K^n u0, u0> / <u0, u0>` for
/// `n = 1..=n_max`, computed with the split pairing that halves the symbolic
/// depth: even `n` pairs `K^{n/2} u0` against `(K*)^{n/2} u0`, odd `n`
/// pairs `K^{(n+1)/2} u0` against `(K*)^{(n-1)/2} u0`.
pub fn gamma_coefficients(
    u0: &SparsePoly,
    n_max: usize,
    spec: &ChainSpec,
) -> Result<Vec<f64>, FpError> {
    let measure = GibbsMeasure::new(spec)?;
    gamma_coefficients_with(u0, n_max, spec, &measure)
}

/// [`gamma_coefficients`] against a caller-owned measure, so the moment memo
/// table is shared across calls.
pub fn gamma_coefficients_with(
    u0: &SparsePoly,
    n_max: usize,
    spec: &ChainSpec,
    measure: &GibbsMeasure,
) -> Result<Vec<f64>, FpError> {
    let norm = measure.norm_sq(u0)?;
    if !norm.is_finite() || norm <= 0.0 {
        return Err(FpError::DegenerateObservable);
    }
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let fwd_depth = n_max.div_ceil(2);
    let adj_depth = n_max / 2;
    let forward = operator_iterates(u0, spec, Direction::Forward, fwd_depth)?;
    let adjoint = operator_iterates(u0, spec, Direction::Adjoint, adj_depth)?;
    let mut gamma = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let hi = n.div_ceil(2);
        let lo = n / 2;
        let value = measure.product_expectation(&forward[hi], &adjoint[lo])?;
        gamma.push(value / norm);
    }
    Ok(gamma)
}

fn operator_iterates(
    u0: &SparsePoly,
    spec: &ChainSpec,
    direction: Direction,
    depth: usize,
) -> Result<Vec<SparsePoly>, PolyError> {
    let mut out = Vec::with_capacity(depth + 1);
    out.push(u0.clone());
    for k in 0..depth {
        let next = apply_kolmogorov(&out[k], spec, direction)?;
        out.push(next);
    }
    Ok(out)
}

/// Streaming coefficient `Omega = <K u0, u0> / <u0, u0>`, i.e. `gamma_1`.
pub fn streaming_coefficient(u0: &SparsePoly, spec: &ChainSpec) -> Result<f64, FpError> {
    Ok(gamma_coefficients(u0, 1, spec)?[0])
}

/// Projected cumulants from plain moments:
/// `mu_1 = gamma_1`, `mu_n = gamma_n - sum_{j=1}^{n-1} mu_{n-j} gamma_j`.
pub fn mu_from_gamma(gamma: &[f64]) -> Vec<f64> {
    let mut mu = Vec::with_capacity(gamma.len());
    for (n, &g) in gamma.iter().enumerate() {
        // n is zero-based: entry n holds gamma_{n+1}.
        let mut value = g;
        for j in 0..n {
            value -= mu[n - 1 - j] * gamma[j];
        }
        mu.push(value);
    }
    mu
}

/// Matrix analogue of [`mu_from_gamma`]:
/// `M_n = Gamma_n - sum_{i=1}^{n-1} Gamma_{n-i} M_i`; reduces to the scalar
/// recurrence when the blocks are 1x1.
pub fn mu_from_gamma_matrix(gamma: &[DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>, FpError> {
    let Some(first) = gamma.first() else {
        return Ok(Vec::new());
    };
    let dim = first.nrows();
    for (index, g) in gamma.iter().enumerate() {
        if g.nrows() != dim || g.ncols() != dim {
            return Err(FpError::DimensionMismatch {
                index,
                rows: g.nrows(),
                cols: g.ncols(),
                expected: dim,
            });
        }
    }
    let mut mu: Vec<DMatrix<f64>> = Vec::with_capacity(gamma.len());
    for (n, g) in gamma.iter().enumerate() {
        let mut value = g.clone();
        for i in 0..n {
            // Gamma_{n-i} M_{i+1} in one-based indices.
            value -= &gamma[n - 1 - i] * &mu[i];
        }
        mu.push(value);
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use poly_algebra::Var;

    #[test]
    fn momentum_streaming_coefficient_is_minus_gamma_over_mass() {
        let spec = ChainSpec::fpu_uniform(8, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let u0 = SparsePoly::variable(Var::p(3));
        let omega = streaming_coefficient(&u0, &spec).unwrap();
        assert!((omega + 1.0).abs() < 1e-12, "Omega = {omega}");
    }

    #[test]
    fn extension_first_moment_vanishes_by_parity() {
        let spec = ChainSpec::fpu_uniform(8, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let u0 = SparsePoly::variable(Var::r(3));
        let g = gamma_coefficients(&u0, 1, &spec).unwrap();
        assert_eq!(g[0], 0.0);
    }

    #[test]
    fn harmonic_second_moment_matches_hand_value() {
        // theta = 0, unit parameters: gamma_2 for p_j is
        // <K p, K* p>/<p^2> = (<p^2> - 2/(beta nu)) / <p^2> = -1.
        let spec = ChainSpec::fpu_uniform(8, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let u0 = SparsePoly::variable(Var::p(3));
        let g = gamma_coefficients(&u0, 2, &spec).unwrap();
        assert!((g[0] + 1.0).abs() < 1e-12);
        assert!((g[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn mu_recurrence_examples() {
        assert_eq!(mu_from_gamma(&[3.5]), vec![3.5]);
        // gamma = (-1, -1): mu_2 = gamma_2 - mu_1 gamma_1 = -2.
        assert_eq!(mu_from_gamma(&[-1.0, -1.0]), vec![-1.0, -2.0]);
        assert_eq!(mu_from_gamma(&[0.0; 5]), vec![0.0; 5]);
        assert!(mu_from_gamma(&[]).is_empty());
    }

    #[test]
    fn matrix_recurrence_reduces_to_scalar() {
        let gamma = [-1.0, -1.0, 3.0, 1.0, -11.0];
        let blocks: Vec<DMatrix<f64>> = gamma
            .iter()
            .map(|&g| DMatrix::from_element(1, 1, g))
            .collect();
        let mu_s = mu_from_gamma(&gamma);
        let mu_m = mu_from_gamma_matrix(&blocks).unwrap();
        for (a, b) in mu_s.iter().zip(&mu_m) {
            assert!((a - b[(0, 0)]).abs() < 1e-14);
        }
    }

    #[test]
    fn matrix_recurrence_checks_dimensions() {
        let blocks = vec![
            DMatrix::<f64>::identity(2, 2),
            DMatrix::<f64>::identity(3, 3),
        ];
        assert!(matches!(
            mu_from_gamma_matrix(&blocks),
            Err(FpError::DimensionMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn zero_matrices_give_zero_cumulants() {
        let blocks = vec![DMatrix::<f64>::zeros(3, 3); 4];
        let mu = mu_from_gamma_matrix(&blocks).unwrap();
        assert!(mu.iter().all(|m| m.iter().all(|&x| x == 0.0)));
    }
}
