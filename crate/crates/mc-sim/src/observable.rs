use std::fmt;

use serde::{Deserialize, Serialize};

use poly_algebra::ModelKind;

use crate::error::McError;
use crate::state::ChainState;

/// A scalar observable recorded along trajectories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "site")]
pub enum Observable {
    /// `p_j` (both models).
    Momentum(usize),
    /// Bond extension `r_j` (periodic chain only).
    Extension(usize),
    /// Coordinate `q_j` (heat-conduction chain only).
    Position(usize),
    /// `p_j^2` (both models).
    MomentumSquared(usize),
}

impl Observable {
    pub fn site(&self) -> usize {
        match *self {
            Observable::Momentum(j)
            | Observable::Extension(j)
            | Observable::Position(j)
            | Observable::MomentumSquared(j) => j,
        }
    }

    pub fn check_compatible(&self, kind: ModelKind, n_sites: usize) -> Result<(), McError> {
        let model = match kind {
            ModelKind::FpuLangevin => "fpu-langevin",
            ModelKind::HeatConduction => "heat-conduction",
        };
        let ok = matches!(
            (self, kind),
            (Observable::Extension(_), ModelKind::FpuLangevin)
                | (Observable::Position(_), ModelKind::HeatConduction)
                | (Observable::Momentum(_) | Observable::MomentumSquared(_), _)
        );
        if !ok || self.site() >= n_sites {
            return Err(McError::ObservableMismatch {
                observable: self.to_string(),
                model,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, state: &ChainState) -> f64 {
        match (*self, state) {
            (Observable::Momentum(j), ChainState::Fpu { p, .. }) => p[j],
            (Observable::Momentum(j), ChainState::Heat { p, .. }) => p[j],
            (Observable::MomentumSquared(j), ChainState::Fpu { p, .. }) => p[j] * p[j],
            (Observable::MomentumSquared(j), ChainState::Heat { p, .. }) => p[j] * p[j],
            (Observable::Extension(j), ChainState::Fpu { r, .. }) => r[j],
            (Observable::Position(j), ChainState::Heat { q, .. }) => q[j],
            _ => f64::NAN,
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Observable::Momentum(j) => write!(f, "p[{j}]"),
            Observable::Extension(j) => write!(f, "r[{j}]"),
            Observable::Position(j) => write!(f, "q[{j}]"),
            Observable::MomentumSquared(j) => write!(f, "p2[{j}]"),
        }
    }
}

impl std::str::FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, rest) = s
            .split_once('[')
            .ok_or_else(|| format!("expected `name[site]`, got `{s}`"))?;
        let site: usize = rest
            .strip_suffix(']')
            .ok_or_else(|| format!("missing `]` in `{s}`"))?
            .parse()
            .map_err(|e| format!("bad site in `{s}`: {e}"))?;
        match name {
            "p" => Ok(Observable::Momentum(site)),
            "r" => Ok(Observable::Extension(site)),
            "q" => Ok(Observable::Position(site)),
            "p2" => Ok(Observable::MomentumSquared(site)),
            other => Err(format!("unknown observable `{other}`")),
        }
    }
}
