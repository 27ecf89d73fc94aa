/// Phase-space state of a simulated chain.
#[derive(Clone, Debug, PartialEq)]
pub enum ChainState {
    /// Periodic chain in bond coordinates.
    Fpu { r: Vec<f64>, p: Vec<f64> },
    /// Open chain plus the two bath variables.
    Heat {
        q: Vec<f64>,
        p: Vec<f64>,
        bath_l: f64,
        bath_r: f64,
    },
}

impl ChainState {
    pub fn is_finite(&self) -> bool {
        match self {
            ChainState::Fpu { r, p } => {
                r.iter().all(|x| x.is_finite()) && p.iter().all(|x| x.is_finite())
            }
            ChainState::Heat { q, p, bath_l, bath_r } => {
                q.iter().all(|x| x.is_finite())
                    && p.iter().all(|x| x.is_finite())
                    && bath_l.is_finite()
                    && bath_r.is_finite()
            }
        }
    }

    /// Flattened coordinates, used by point initial conditions.
    pub fn from_flat_fpu(n: usize, flat: &[f64]) -> Option<ChainState> {
        if flat.len() != 2 * n {
            return None;
        }
        Some(ChainState::Fpu {
            r: flat[..n].to_vec(),
            p: flat[n..].to_vec(),
        })
    }

    pub fn from_flat_heat(n: usize, flat: &[f64]) -> Option<ChainState> {
        if flat.len() != 2 * n + 2 {
            return None;
        }
        Some(ChainState::Heat {
            q: flat[..n].to_vec(),
            p: flat[n..2 * n].to_vec(),
            bath_l: flat[2 * n],
            bath_r: flat[2 * n + 1],
        })
    }
}
