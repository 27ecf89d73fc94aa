//! Closed-form oracle for the harmonic chain: with `theta = 0` the drift is
//! linear, so the operator moments of a linear observable reduce to matrix
//! powers against the stationary covariance. The covariance solves the
//! continuous Lyapunov equation up to the conserved total-extension
//! direction, which is fixed to the product-measure value.

use fp_kernel::{gamma_coefficients, mu_from_gamma};
use nalgebra::{DMatrix, DVector};
use poly_algebra::{ChainSpec, SparsePoly, Var};

struct LinearChain {
    n: usize,
    drift: DMatrix<f64>,
    covariance: DMatrix<f64>,
}

/// State ordering: `x = (r_0..r_{N-1}, p_0..p_{N-1})`.
fn linear_chain(n: usize, nu: f64, mass: f64, gamma: f64, beta: f64) -> LinearChain {
    let dim = 2 * n;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut noise = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..n {
        let jm = (j + n - 1) % n;
        let jp = (j + 1) % n;
        // dr_j = (p_j - p_{j-1})/m
        a[(j, n + j)] += 1.0 / mass;
        a[(j, n + jm)] -= 1.0 / mass;
        // dp_j = nu (r_{j+1} - r_j) - gamma p_j / m
        a[(n + j, jp)] += nu;
        a[(n + j, j)] -= nu;
        a[(n + j, n + j)] -= gamma / mass;
        noise[(n + j, n + j)] = 2.0 * gamma / beta;
    }
    // Solve A S + S A^T = -noise by vectorization; the operator is singular
    // along v v^T (v spans the conserved sum of extensions), so use the
    // pseudo-inverse and then pin that component to the product measure.
    let lyap = kron_sum(&a);
    let rhs = DVector::from_iterator(dim * dim, noise.iter().map(|&x| -x));
    let svd = nalgebra::SVD::new(lyap, true, true);
    let sol = svd.solve(&rhs, 1e-10).expect("lyapunov least squares");
    let mut s = DMatrix::from_iterator(dim, dim, sol.iter().copied());
    s = (&s + s.transpose()) * 0.5;
    let mut v = DVector::zeros(dim);
    for j in 0..n {
        v[j] = 1.0;
    }
    let target = n as f64 / (beta * nu); // Var(sum_j r_j) under the product measure
    let current = (v.transpose() * &s * &v)[(0, 0)];
    let c = (target - current) / (n as f64 * n as f64);
    s += c * &v * v.transpose();
    LinearChain {
        n,
        drift: a,
        covariance: s,
    }
}

/// `I kron A + A kron I` acting on vec(S) for `A S + S A^T`.
fn kron_sum(a: &DMatrix<f64>) -> DMatrix<f64> {
    let d = a.nrows();
    let mut m = DMatrix::<f64>::zeros(d * d, d * d);
    // vec by columns: S_{ij} at index j*d + i.
    for i in 0..d {
        for j in 0..d {
            let row = j * d + i;
            for k in 0..d {
                // (A S)_{ij} = sum_k A_{ik} S_{kj}
                m[(row, j * d + k)] += a[(i, k)];
                // (S A^T)_{ij} = sum_k S_{ik} A_{jk}
                m[(row, k * d + i)] += a[(j, k)];
            }
        }
    }
    m
}

impl LinearChain {
    fn selector(&self, var: Var) -> DVector<f64> {
        let mut e = DVector::zeros(2 * self.n);
        let idx = if var.is_momentum() {
            self.n + var.site()
        } else {
            var.site()
        };
        e[idx] = 1.0;
        e
    }

    /// `gamma_k = e^T A^k S e / (e^T S e)` for `k = 1..=n_max`.
    fn gamma_oracle(&self, var: Var, n_max: usize) -> Vec<f64> {
        let e = self.selector(var);
        let den = (e.transpose() * &self.covariance * &e)[(0, 0)];
        let mut out = Vec::with_capacity(n_max);
        let mut cur = &self.covariance * &e;
        for _ in 1..=n_max {
            cur = &self.drift * cur;
            out.push((e.transpose() * &cur)[(0, 0)] / den);
        }
        out
    }
}

#[test]
fn symbolic_gammas_match_lyapunov_oracle() {
    for n in [4usize, 6] {
        let spec = ChainSpec::fpu_uniform(n, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let chain = linear_chain(n, 1.0, 1.0, 1.0, 1.0);
        for var in [Var::p(0), Var::r(0)] {
            let symbolic = gamma_coefficients(&SparsePoly::variable(var), 8, &spec).unwrap();
            let oracle = chain.gamma_oracle(var, 8);
            for k in 0..8 {
                assert!(
                    (symbolic[k] - oracle[k]).abs() < 1e-10,
                    "N={n} {var:?} gamma_{}: symbolic {} vs oracle {}",
                    k + 1,
                    symbolic[k],
                    oracle[k]
                );
            }
        }
    }
}

#[test]
fn non_unit_parameters_still_match_oracle() {
    let (mass, nu, gamma, beta) = (1.7, 0.6, 0.4, 2.5);
    let spec = ChainSpec::fpu_uniform(5, mass, nu, 0.0, beta, gamma).unwrap();
    let chain = linear_chain(5, nu, mass, gamma, beta);
    let symbolic = gamma_coefficients(&SparsePoly::variable(Var::p(2)), 6, &spec).unwrap();
    let oracle = chain.gamma_oracle(Var::p(2), 6);
    for k in 0..6 {
        assert!(
            (symbolic[k] - oracle[k]).abs() < 1e-10 * oracle[k].abs().max(1.0),
            "gamma_{}: {} vs {}",
            k + 1,
            symbolic[k],
            oracle[k]
        );
    }
}

#[test]
fn short_time_derivatives_of_the_projected_equation_match_gammas() {
    // The projected evolution equation propagates its own derivatives at
    // zero: C^{(n+1)}(0) = Omega C^{(n)}(0) + sum_k K^{(k)}(0) C^{(n-1-k)}(0)
    // with K^{(k)}(0) = mu_{k+2}. Feeding the symbolic cumulants through
    // this recurrence must reproduce gamma_n = C^{(n)}(0)/C(0).
    let n_max = 10;
    let spec = ChainSpec::fpu_uniform(6, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
    let gamma = gamma_coefficients(&SparsePoly::variable(Var::p(0)), n_max, &spec).unwrap();
    let mu = mu_from_gamma(&gamma);
    let omega = gamma[0];
    // c[n] = C^{(n)}(0)/C(0)
    let mut c = vec![0.0; n_max + 1];
    c[0] = 1.0;
    for n in 0..n_max {
        let mut next = omega * c[n];
        for k in 0..n {
            next += mu[k + 1] * c[n - 1 - k];
        }
        c[n + 1] = next;
    }
    for n in 1..=n_max {
        assert!(
            (c[n] - gamma[n - 1]).abs() < 1e-9 * gamma[n - 1].abs().max(1.0),
            "derivative order {n}: recurrence {} vs gamma {}",
            c[n],
            gamma[n - 1]
        );
    }
}
