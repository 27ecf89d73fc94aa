use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::basis::{faber_polynomial_coefficients, BasisSpec};
use crate::error::FpError;

/// A parametrized memory kernel `K(t) = sum_n k_n g_n(t)` together with the
/// streaming coefficient of its scalar evolution equation and a descriptor
/// of the observable it was built for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelModel {
    pub omega: f64,
    pub basis: BasisSpec,
    pub coeffs: Vec<f64>,
    pub observable: String,
}

impl KernelModel {
    pub fn new(
        omega: f64,
        basis: BasisSpec,
        coeffs: Vec<f64>,
        observable: impl Into<String>,
    ) -> Result<Self, FpError> {
        basis.validate()?;
        if let Some(pos) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(FpError::NonFiniteCoefficient(pos));
        }
        Ok(KernelModel {
            omega,
            basis,
            coeffs,
            observable: observable.into(),
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let g = self.basis.eval_sequence(self.order(), t);
        self.coeffs.iter().zip(&g).map(|(k, b)| k * b).sum()
    }

    /// Kernel samples on a uniform grid starting at `t0`.
    pub fn evaluate_grid(&self, t0: f64, dt: f64, len: usize) -> Vec<f64> {
        (0..len).map(|i| self.evaluate(t0 + dt * i as f64)).collect()
    }

    /// Structured text form: basis kind and parameters, streaming
    /// coefficient, coefficient list at 17 significant digits, observable
    /// descriptor. Parsed back by [`KernelModel::from_toml_str`].
    pub fn to_toml_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "observable = {:?}", self.observable);
        let _ = writeln!(s, "omega = {:.17e}", self.omega);
        s.push_str("coeffs = [\n");
        for c in &self.coeffs {
            let _ = writeln!(s, "  {c:.17e},");
        }
        s.push_str("]\n");
        match self.basis {
            BasisSpec::Taylor => {
                let _ = writeln!(s, "\n[basis]\nkind = \"taylor\"");
            }
            BasisSpec::Faber { a, b } => {
                let _ = writeln!(
                    s,
                    "\n[basis]\nkind = \"faber\"\na = {a:.17e}\nb = {b:.17e}"
                );
            }
            BasisSpec::Laguerre { sigma } => {
                let _ = writeln!(s, "\n[basis]\nkind = \"laguerre\"\nsigma = {sigma:.17e}");
            }
        }
        s
    }

    pub fn from_toml_str(text: &str) -> Result<Self, FpError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            observable: String,
            omega: f64,
            basis: BasisSpec,
            coeffs: Vec<f64>,
        }
        let raw: Raw = toml::from_str(text).map_err(|e| FpError::Parse(e.to_string()))?;
        KernelModel::new(raw.omega, raw.basis, raw.coeffs, raw.observable)
    }

    pub fn save(&self, path: &Path) -> Result<(), FpError> {
        std::fs::write(path, self.to_toml_string())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, FpError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

/// Builds the kernel model of expansion order `order` from projected
/// cumulants `mu` (`mu[0] = mu_1`).
///
/// For the Taylor family the coefficient paired with `g_n(t) = t^n/n!` is
/// `mu_{n+2}`, so `K(t) = sum_{n<=order} mu_{n+2} t^n / n!`. For the Faber
/// family `k_n = sum_j c_{n,j} mu_{j+2}` with `c_{n,j}` the monomial
/// coefficients of the domain polynomials. The streaming coefficient is
/// `mu_1`. The Laguerre family has no operator-polynomial construction here
/// and is rejected.
pub fn kernel_from_mu(
    mu: &[f64],
    basis: &BasisSpec,
    order: usize,
) -> Result<KernelModel, FpError> {
    basis.validate()?;
    if mu.len() < order + 2 {
        return Err(FpError::InsufficientCumulants {
            needed: order + 2,
            got: mu.len(),
        });
    }
    let omega = mu[0];
    let coeffs: Vec<f64> = match *basis {
        BasisSpec::Taylor => (0..=order).map(|n| mu[n + 1]).collect(),
        BasisSpec::Faber { a, b } => {
            let rows = faber_polynomial_coefficients(a, b, order);
            rows.iter()
                .map(|row| row.iter().enumerate().map(|(j, c)| c * mu[j + 1]).sum())
                .collect()
        }
        BasisSpec::Laguerre { .. } => return Err(FpError::UnsupportedBasis("laguerre")),
    };
    KernelModel::new(omega, basis.clone(), coeffs, "")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_kernel_at_zero_is_mu_2() {
        let mu = vec![-1.0, -2.0, 0.0, 2.0];
        let model = kernel_from_mu(&mu, &BasisSpec::Taylor, 2).unwrap();
        assert_eq!(model.evaluate(0.0), -2.0);
        assert_eq!(model.omega, -1.0);
    }

    #[test]
    fn zero_cumulants_give_zero_kernel() {
        let model = kernel_from_mu(&[0.0; 8], &BasisSpec::Taylor, 6).unwrap();
        for t in [0.0, 0.5, 2.0] {
            assert_eq!(model.evaluate(t), 0.0);
        }
    }

    #[test]
    fn insufficient_cumulants_are_rejected() {
        let err = kernel_from_mu(&[1.0, 2.0], &BasisSpec::Taylor, 2).unwrap_err();
        assert!(matches!(err, FpError::InsufficientCumulants { .. }));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let model = KernelModel::new(
            -1.0 / 3.0,
            BasisSpec::Faber {
                a: 1.0,
                b: 2.0f64.sqrt(),
            },
            vec![0.1, -0.25, std::f64::consts::PI, 1e-17],
            "p[50]",
        )
        .unwrap();
        let text = model.to_toml_string();
        let back = KernelModel::from_toml_str(&text).unwrap();
        assert_eq!(model, back);
    }

    #[test]
    fn non_finite_coefficients_are_rejected() {
        let err = KernelModel::new(0.0, BasisSpec::Taylor, vec![1.0, f64::NAN], "x").unwrap_err();
        assert!(matches!(err, FpError::NonFiniteCoefficient(1)));
    }
}
