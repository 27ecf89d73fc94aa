use fp_kernel::KernelModel;
use mc_sim::SampledFunction;
use nalgebra::DMatrix;

use crate::error::GleError;

/// Instability guard: the solution magnitude may not exceed this multiple
/// of the initial value.
const BLOWUP_FACTOR: f64 = 1e6;
/// Bootstrap refinement of the first two steps.
const BOOTSTRAP_REFINE: usize = 32;

/// Uniform output grid `t_k = k dt`, `k = 0..=n_steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self, GleError> {
        if !dt.is_finite() || dt <= 0.0 || n_steps == 0 {
            return Err(GleError::InvalidInput(format!(
                "grid needs dt > 0 and at least one step, got dt={dt}, n={n_steps}"
            )));
        }
        Ok(TimeGrid { dt, n_steps })
    }

    pub fn t_end(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

/// Solves `dC/dt = Omega C + int_0^t K(t-s) C(s) ds` for the scalar
/// correlation function with `C(0) = c0`.
///
/// Third-order Adams-Bashforth in time; the memory convolution uses the
/// composite trapezoid rule with the first Gregory end correction, which
/// keeps the quadrature at the integrator's order. The first two steps are
/// bootstrapped by explicit midpoint on a refined subgrid.
pub fn solve_projected_gle(
    kernel: &KernelModel,
    c0: f64,
    grid: &TimeGrid,
) -> Result<SampledFunction, GleError> {
    let values = volterra_scalar(
        kernel.omega,
        &|t| kernel.evaluate(t),
        &|_| 0.0,
        c0,
        grid,
    )?;
    Ok(SampledFunction::new(0.0, grid.dt, values)?)
}

/// Scalar driver shared by the projected equation (zero forcing) and the
/// reduced-order sample paths (stochastic forcing).
pub(crate) fn volterra_scalar(
    omega: f64,
    kernel_at: &dyn Fn(f64) -> f64,
    forcing_at: &dyn Fn(f64) -> f64,
    c0: f64,
    grid: &TimeGrid,
) -> Result<Vec<f64>, GleError> {
    let n = grid.n_steps;
    let dt = grid.dt;
    let limit = BLOWUP_FACTOR * c0.abs().max(1.0);

    let mut c = vec![0.0f64; n + 1];
    c[0] = c0;
    bootstrap_scalar(omega, kernel_at, forcing_at, &mut c, dt, n);

    // Kernel samples on the coarse grid, newest-lag first is not needed;
    // conv uses K[(i - j)].
    let kvals: Vec<f64> = (0..=n).map(|i| kernel_at(dt * i as f64)).collect();
    let conv = |c: &[f64], i: usize| -> f64 {
        if i == 0 {
            return 0.0;
        }
        // g_j = K(t_i - t_j) C(t_j)
        let g = |j: usize| kvals[i - j] * c[j];
        if i == 1 {
            return 0.5 * dt * (g(0) + g(1));
        }
        let mut acc = 0.5 * (g(0) + g(i));
        for j in 1..i {
            acc += g(j);
        }
        let mut integral = dt * acc;
        // Gregory end correction: -(h/12) [(g_i - g_{i-1}) - (g_1 - g_0)]
        integral -= dt / 12.0 * ((g(i) - g(i - 1)) - (g(1) - g(0)));
        integral
    };

    let mut rhs = vec![0.0f64; n + 1];
    for i in 0..=2.min(n) {
        rhs[i] = omega * c[i] + conv(&c, i) + forcing_at(dt * i as f64);
    }
    for i in 2..n {
        c[i + 1] = c[i] + dt / 12.0 * (23.0 * rhs[i] - 16.0 * rhs[i - 1] + 5.0 * rhs[i - 2]);
        if !c[i + 1].is_finite() || c[i + 1].abs() > limit {
            return Err(GleError::Instability {
                time: dt * (i + 1) as f64,
                magnitude: c[i + 1].abs(),
                limit,
            });
        }
        rhs[i + 1] = omega * c[i + 1] + conv(&c, i + 1) + forcing_at(dt * (i + 1) as f64);
    }
    Ok(c)
}

/// Explicit midpoint on a subgrid of spacing `dt / BOOTSTRAP_REFINE` fills
/// `c[1]` and `c[2]`; its local error sits two orders below the main
/// scheme's, so it does not disturb the observed convergence order.
fn bootstrap_scalar(
    omega: f64,
    kernel_at: &dyn Fn(f64) -> f64,
    forcing_at: &dyn Fn(f64) -> f64,
    c: &mut [f64],
    dt: f64,
    n_steps: usize,
) {
    let r = BOOTSTRAP_REFINE;
    let h = dt / r as f64;
    let take = 2.min(n_steps);
    let fine_n = take * r;
    let mut u = Vec::with_capacity(fine_n + 1);
    u.push(c[0]);
    // Kernel at whole and half subgrid points: index k holds K(k h / 2).
    let khalf: Vec<f64> = (0..=2 * fine_n + 1)
        .map(|k| kernel_at(0.5 * h * k as f64))
        .collect();
    for k in 0..fine_n {
        let t = h * k as f64;
        // Trapezoid over the accumulated fine history.
        let conv_full = |hist: &[f64], lag_half_steps: usize| -> f64 {
            let i = hist.len() - 1;
            if i == 0 {
                return 0.0;
            }
            let g = |j: usize| khalf[2 * (i - j) + lag_half_steps] * hist[j];
            let mut acc = 0.5 * (g(0) + g(i));
            for j in 1..i {
                acc += g(j);
            }
            h * acc
        };
        let g1 = omega * u[k] + conv_full(&u, 0) + forcing_at(t);
        let mid = u[k] + 0.5 * h * g1;
        // Convolution up to t + h/2: history shifted by half a substep plus
        // the final half panel with the midpoint value.
        let shifted = conv_full(&u, 1);
        let tail = 0.25 * h * (khalf[1] * u[k] + khalf[0] * mid);
        let g2 = omega * mid + shifted + tail + forcing_at(t + 0.5 * h);
        u.push(u[k] + h * g2);
    }
    for step in 1..=take {
        c[step] = u[step * r];
    }
}

/// Matrix-valued variant of [`solve_projected_gle`] for an `M`-component
/// observable family: `dC/dt = Omega C + int K(t-s) C(s) ds` with `M x M`
/// blocks.
pub fn solve_projected_gle_matrix(
    omega: &DMatrix<f64>,
    kernel_at: &dyn Fn(f64) -> DMatrix<f64>,
    c0: &DMatrix<f64>,
    grid: &TimeGrid,
) -> Result<Vec<DMatrix<f64>>, GleError> {
    let m = omega.nrows();
    if omega.ncols() != m || c0.nrows() != m || c0.ncols() != m {
        return Err(GleError::InvalidInput(format!(
            "matrix blocks must be square and consistent, got omega {}x{}, c0 {}x{}",
            omega.nrows(),
            omega.ncols(),
            c0.nrows(),
            c0.ncols()
        )));
    }
    let n = grid.n_steps;
    let dt = grid.dt;
    let limit = BLOWUP_FACTOR * c0.abs().max().max(1.0);
    let kvals: Vec<DMatrix<f64>> = (0..=n).map(|i| kernel_at(dt * i as f64)).collect();

    let conv = |c: &[DMatrix<f64>], i: usize| -> DMatrix<f64> {
        if i == 0 {
            return DMatrix::zeros(m, m);
        }
        let g = |j: usize| &kvals[i - j] * &c[j];
        if i == 1 {
            return (g(0) + g(1)) * (0.5 * dt);
        }
        let mut acc = (g(0) + g(i)) * 0.5;
        for j in 1..i {
            acc += g(j);
        }
        acc * dt - ((g(i) - g(i - 1)) - (g(1) - g(0))) * (dt / 12.0)
    };

    // Bootstrap by explicit midpoint on the refined grid, component-wise in
    // matrix arithmetic.
    let r = BOOTSTRAP_REFINE;
    let h = dt / r as f64;
    let take = 2.min(n);
    let fine_n = take * r;
    let khalf: Vec<DMatrix<f64>> = (0..=2 * fine_n + 1)
        .map(|k| kernel_at(0.5 * h * k as f64))
        .collect();
    let mut u: Vec<DMatrix<f64>> = vec![c0.clone()];
    for k in 0..fine_n {
        let conv_full = |hist: &[DMatrix<f64>], lag_half: usize| -> DMatrix<f64> {
            let i = hist.len() - 1;
            if i == 0 {
                return DMatrix::zeros(m, m);
            }
            let g = |j: usize| &khalf[2 * (i - j) + lag_half] * &hist[j];
            let mut acc = (g(0) + g(i)) * 0.5;
            for j in 1..i {
                acc += g(j);
            }
            acc * h
        };
        let g1 = omega * &u[k] + conv_full(&u, 0);
        let mid = &u[k] + g1 * (0.5 * h);
        let tail = (&khalf[1] * &u[k] + &khalf[0] * &mid) * (0.25 * h);
        let g2 = omega * &mid + conv_full(&u, 1) + tail;
        let next = &u[k] + g2 * h;
        u.push(next);
    }

    let mut c: Vec<DMatrix<f64>> = Vec::with_capacity(n + 1);
    c.push(c0.clone());
    for step in 1..=take {
        c.push(u[step * r].clone());
    }
    let mut rhs: Vec<DMatrix<f64>> = Vec::with_capacity(n + 1);
    for i in 0..=take {
        rhs.push(omega * &c[i] + conv(&c, i));
    }
    for i in 2..n {
        let next = &c[i] + (&rhs[i] * 23.0 - &rhs[i - 1] * 16.0 + &rhs[i - 2] * 5.0) * (dt / 12.0);
        let mag = next.abs().max();
        if !mag.is_finite() || mag > limit {
            return Err(GleError::Instability {
                time: dt * (i + 1) as f64,
                magnitude: mag,
                limit,
            });
        }
        c.push(next);
        let i1 = i + 1;
        rhs.push(omega * &c[i1] + conv(&c, i1));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fp_kernel::BasisSpec;

    #[test]
    fn memoryless_equation_gives_exponential() {
        let kernel = KernelModel::new(-1.0, BasisSpec::Taylor, vec![], "test").unwrap();
        let grid = TimeGrid::new(0.01, 300).unwrap();
        let c = solve_projected_gle(&kernel, 1.0, &grid).unwrap();
        let mut worst = 0.0f64;
        for (t, v) in c.iter_points() {
            worst = worst.max((v - (-t).exp()).abs());
        }
        // Third-order scheme at dt = 0.01.
        assert!(worst < 5e-7, "sup error {worst:.3e}");
    }

    #[test]
    fn constant_negative_kernel_gives_cosine() {
        // Omega = 0, K = -1: differentiating gives C'' = -C, so C = cos t.
        let kernel = KernelModel::new(0.0, BasisSpec::Taylor, vec![-1.0], "test").unwrap();
        let grid = TimeGrid::new(0.005, 400).unwrap();
        let c = solve_projected_gle(&kernel, 1.0, &grid).unwrap();
        let mut worst = 0.0f64;
        for (t, v) in c.iter_points() {
            worst = worst.max((v - t.cos()).abs());
        }
        assert!(worst < 1e-7, "sup error {worst:.3e}");
    }

    #[test]
    fn halving_the_step_cuts_the_error_eightfold() {
        let kernel = KernelModel::new(0.0, BasisSpec::Taylor, vec![-1.0], "test").unwrap();
        let sup_err = |dt: f64| {
            let grid = TimeGrid::new(dt, (2.0 / dt).round() as usize).unwrap();
            let c = solve_projected_gle(&kernel, 1.0, &grid).unwrap();
            c.iter_points()
                .map(|(t, v)| (v - t.cos()).abs())
                .fold(0.0, f64::max)
        };
        let es: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&dt| sup_err(dt)).collect();
        for w in es.windows(2) {
            let ratio = w[0] / w[1];
            assert!(
                (7.0..9.0).contains(&ratio),
                "order-3 ratio out of band: {ratio} ({es:?})"
            );
        }
    }

    #[test]
    fn instability_is_reported() {
        // Omega > 0 with a positive kernel grows without bound.
        let kernel = KernelModel::new(5.0, BasisSpec::Taylor, vec![4.0], "test").unwrap();
        let grid = TimeGrid::new(0.05, 2000).unwrap();
        let err = solve_projected_gle(&kernel, 1.0, &grid).unwrap_err();
        assert!(matches!(err, GleError::Instability { .. }));
    }

    #[test]
    fn one_by_one_matrix_solver_matches_scalar() {
        let kernel = KernelModel::new(-0.4, BasisSpec::Taylor, vec![-0.8, 0.3], "test").unwrap();
        let grid = TimeGrid::new(0.01, 150).unwrap();
        let scalar = solve_projected_gle(&kernel, 0.7, &grid).unwrap();
        let omega = DMatrix::from_element(1, 1, -0.4);
        let c0 = DMatrix::from_element(1, 1, 0.7);
        let matrix = solve_projected_gle_matrix(
            &omega,
            &|t| DMatrix::from_element(1, 1, kernel.evaluate(t)),
            &c0,
            &grid,
        )
        .unwrap();
        for (i, v) in scalar.values().iter().enumerate() {
            assert!((v - matrix[i][(0, 0)]).abs() < 1e-13);
        }
    }

    #[test]
    fn matrix_solver_handles_coupled_blocks() {
        // d/dt C = Omega C with K = 0 and skew Omega: columns rotate.
        let omega = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let c0 = DMatrix::identity(2, 2);
        let grid = TimeGrid::new(0.002, 500).unwrap();
        let sol = solve_projected_gle_matrix(&omega, &|_| DMatrix::zeros(2, 2), &c0, &grid)
            .unwrap();
        let t = grid.t_end();
        let last = &sol[grid.n_steps];
        let expect = DMatrix::from_row_slice(2, 2, &[t.cos(), t.sin(), -t.sin(), t.cos()]);
        assert!((last - expect).abs().max() < 1e-8);
    }
}
