use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j_sequence;
use crate::error::FpError;

/// Temporal basis family used for memory-kernel expansions.
///
/// * `taylor`: `g_n(t) = t^n / n!`
/// * `faber`: `g_n(t) = exp(-a t) J_n(b t)`, adapted to a spectral
///   inclusion domain with shift `a > 0` and width `b > 0`
/// * `laguerre`: `phi_n(t) = L_n(sigma t) exp(-sigma t / 2)` with time
///   scale `sigma > 0`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BasisSpec {
    Taylor,
    Faber { a: f64, b: f64 },
    Laguerre { sigma: f64 },
}

impl BasisSpec {
    pub fn validate(&self) -> Result<(), FpError> {
        match *self {
            BasisSpec::Taylor => Ok(()),
            BasisSpec::Faber { a, b } => {
                if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
                    Ok(())
                } else {
                    Err(FpError::InvalidBasis(format!(
                        "faber parameters must be positive, got a={a} b={b}"
                    )))
                }
            }
            BasisSpec::Laguerre { sigma } => {
                if sigma > 0.0 && sigma.is_finite() {
                    Ok(())
                } else {
                    Err(FpError::InvalidBasis(format!(
                        "laguerre time scale must be positive, got {sigma}"
                    )))
                }
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            BasisSpec::Taylor => "taylor",
            BasisSpec::Faber { .. } => "faber",
            BasisSpec::Laguerre { .. } => "laguerre",
        }
    }

    /// Values of the first `n_max + 1` basis functions at time `t`.
    pub fn eval_sequence(&self, n_max: usize, t: f64) -> Vec<f64> {
        match *self {
            BasisSpec::Taylor => {
                let mut out = Vec::with_capacity(n_max + 1);
                let mut cur = 1.0;
                out.push(cur);
                for n in 1..=n_max {
                    cur *= t / n as f64;
                    out.push(cur);
                }
                out
            }
            BasisSpec::Faber { a, b } => {
                let damp = (-a * t).exp();
                bessel_j_sequence(n_max, b * t)
                    .into_iter()
                    .map(|j| damp * j)
                    .collect()
            }
            BasisSpec::Laguerre { sigma } => laguerre_sequence(n_max, sigma, t),
        }
    }

    pub fn eval(&self, n: usize, t: f64) -> f64 {
        self.eval_sequence(n, t)[n]
    }
}

/// Laguerre function `phi_n(t) = L_n(sigma t) exp(-sigma t / 2)`; decays to
/// zero and is orthogonal with `int_0^inf phi_m phi_n dt = delta_mn / sigma`.
pub fn laguerre_basis(n: usize, sigma: f64, t: f64) -> f64 {
    laguerre_sequence(n, sigma, t)[n]
}

/// All Laguerre functions up to order `n_max` at one time, by the stable
/// three-term recurrence `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`.
pub fn laguerre_sequence(n_max: usize, sigma: f64, t: f64) -> Vec<f64> {
    let x = sigma * t;
    let damp = (-0.5 * x).exp();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut lkm1 = 1.0;
    out.push(damp * lkm1);
    if n_max == 0 {
        return out;
    }
    let mut lk = 1.0 - x;
    out.push(damp * lk);
    for k in 1..n_max {
        let kf = k as f64;
        let lkp1 = ((2.0 * kf + 1.0 - x) * lk - kf * lkm1) / (kf + 1.0);
        lkm1 = lk;
        lk = lkp1;
        out.push(damp * lk);
    }
    out
}

/// Monomial coefficient rows of the spectral-domain polynomial family
/// `Phi_n` paired with `g_n(t) = exp(-a t) J_n(b t)`: row `n` holds the
/// coefficients of `Phi_n(x)` in ascending powers of `x`.
///
/// The family follows the three-term recurrence
/// `F_{n+1}(x) = (2/b)(x + a) F_n(x) + F_{n-1}(x)` seeded with the doubled
/// constant `F_0 = 2`, `F_1 = (2/b)(x + a)`; the emitted row 0 is the
/// half-weighted constant `Phi_0 = 1`, so that
/// `exp(t X) = sum_n g_n(t) Phi_n(X)` holds exactly on the inclusion
/// domain. The convention is pinned by the matrix-exponential oracle test;
/// if that test fails the build fails.
pub fn faber_polynomial_coefficients(a: f64, b: f64, order: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(order + 2);
    rows.push(vec![2.0]);
    if order >= 1 {
        rows.push(vec![2.0 * a / b, 2.0 / b]);
    }
    for n in 1..order {
        let cur = &rows[n];
        let prev = &rows[n - 1];
        let mut next = vec![0.0; cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i] += c * 2.0 * a / b;
            next[i + 1] += c * 2.0 / b;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] += c;
        }
        rows.push(next);
    }
    rows[0] = vec![1.0];
    rows.truncate(order + 1);
    rows
}
