use serde::{Deserialize, Serialize};

use crate::error::PolyError;

/// Which physical chain a [`ChainSpec`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Periodic anharmonic chain in bond coordinates `(r, p)` with per-site
    /// Langevin thermostats.
    FpuLangevin,
    /// Open chain `q_0..q_{N-1}` coupled to two Ornstein-Uhlenbeck heat
    /// baths through auxiliary variables `r_L`, `r_R`.
    HeatConduction,
}

/// Heat-bath parameters of the heat-conduction chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub t_left: f64,
    pub t_right: f64,
    pub gamma_left: f64,
    pub gamma_right: f64,
    pub lambda_left: f64,
    pub lambda_right: f64,
}

/// Physical description of a chain model: particle count, mass, potential
/// coefficients (`V(x) = nu x^2/2 + theta x^4/4`), inverse temperature and
/// the per-site friction sequence. Heat-conduction chains carry bath
/// parameters in addition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub kind: ModelKind,
    pub n_sites: usize,
    pub mass: f64,
    pub nu: f64,
    pub theta: f64,
    pub beta: f64,
    pub gamma: Vec<f64>,
    pub bath: Option<BathSpec>,
}

impl ChainSpec {
    /// Periodic stochastic chain with a per-site friction sequence.
    pub fn fpu(
        n_sites: usize,
        mass: f64,
        nu: f64,
        theta: f64,
        beta: f64,
        gamma: Vec<f64>,
    ) -> Result<Self, PolyError> {
        let spec = ChainSpec {
            kind: ModelKind::FpuLangevin,
            n_sites,
            mass,
            nu,
            theta,
            beta,
            gamma,
            bath: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Periodic chain with the same friction `gamma` on every site.
    pub fn fpu_uniform(
        n_sites: usize,
        mass: f64,
        nu: f64,
        theta: f64,
        beta: f64,
        gamma: f64,
    ) -> Result<Self, PolyError> {
        Self::fpu(n_sites, mass, nu, theta, beta, vec![gamma; n_sites])
    }

    /// Periodic chain damped on a single tagged site only.
    pub fn fpu_single_site_friction(
        n_sites: usize,
        mass: f64,
        nu: f64,
        theta: f64,
        beta: f64,
        site: usize,
        gamma: f64,
    ) -> Result<Self, PolyError> {
        let mut g = vec![0.0; n_sites];
        if site >= n_sites {
            return Err(PolyError::InvalidSpec(format!(
                "friction site {site} out of range for {n_sites} sites"
            )));
        }
        g[site] = gamma;
        Self::fpu(n_sites, mass, nu, theta, beta, g)
    }

    /// Open heat-conduction chain. `beta` is kept as a reference inverse
    /// temperature (used only when both bath temperatures agree).
    pub fn heat_conduction(
        n_sites: usize,
        mass: f64,
        nu: f64,
        theta: f64,
        bath: BathSpec,
    ) -> Result<Self, PolyError> {
        let beta = if bath.t_left == bath.t_right {
            1.0 / bath.t_left
        } else {
            2.0 / (bath.t_left + bath.t_right)
        };
        let spec = ChainSpec {
            kind: ModelKind::HeatConduction,
            n_sites,
            mass,
            nu,
            theta,
            beta,
            gamma: vec![0.0; n_sites],
            bath: Some(bath),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), PolyError> {
        let err = |msg: String| Err(PolyError::InvalidSpec(msg));
        if self.n_sites < 2 {
            return err(format!("need at least 2 sites, got {}", self.n_sites));
        }
        if !self.mass.is_finite() || self.mass <= 0.0 {
            return err(format!("mass must be positive, got {}", self.mass));
        }
        if !self.beta.is_finite() || self.beta <= 0.0 {
            return err(format!("beta must be positive, got {}", self.beta));
        }
        if self.nu < 0.0 || self.theta < 0.0 {
            return err(format!(
                "potential coefficients must be nonnegative, got nu={} theta={}",
                self.nu, self.theta
            ));
        }
        if self.nu + self.theta <= 0.0 {
            return err("potential is not confining: nu + theta must be positive".into());
        }
        if self.gamma.len() != self.n_sites {
            return err(format!(
                "friction sequence has {} entries for {} sites",
                self.gamma.len(),
                self.n_sites
            ));
        }
        if self.gamma.iter().any(|&g| g < 0.0 || !g.is_finite()) {
            return err("friction entries must be finite and nonnegative".into());
        }
        match (self.kind, &self.bath) {
            (ModelKind::HeatConduction, None) => {
                return err("heat-conduction chain needs bath parameters".into())
            }
            (ModelKind::HeatConduction, Some(b)) => {
                if !(b.t_left > 0.0 && b.t_right > 0.0) {
                    return err("bath temperatures must be positive".into());
                }
                if b.gamma_left < 0.0 || b.gamma_right < 0.0 {
                    return err("bath frictions must be nonnegative".into());
                }
            }
            (ModelKind::FpuLangevin, Some(_)) => {
                return err("bath parameters are only meaningful for heat-conduction".into())
            }
            (ModelKind::FpuLangevin, None) => {}
        }
        Ok(())
    }

    /// `V'(x) = nu x + theta x^3`.
    pub fn potential_derivative(&self, x: f64) -> f64 {
        self.nu * x + self.theta * x * x * x
    }

    /// `V(x) = nu x^2/2 + theta x^4/4`.
    pub fn potential(&self, x: f64) -> f64 {
        0.5 * self.nu * x * x + 0.25 * self.theta * x.powi(4)
    }

    pub fn site_up(&self, j: usize) -> usize {
        (j + 1) % self.n_sites
    }

    pub fn site_down(&self, j: usize) -> usize {
        (j + self.n_sites - 1) % self.n_sites
    }
}
