use poly_algebra::{BathSpec, ChainSpec, ModelKind, PolyError};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::McError;

/// Euler-Maruyama step (strong order 1 for this additive noise) of the open
/// chain coupled to two Ornstein-Uhlenbeck baths:
///
/// ```text
/// dq_i = p_i/m dt
/// dp_i = [-V1'(q_i) - V2'(q_i - q_{i-1}) + V2'(q_{i+1} - q_i)] dt   (interior)
/// dp_0   += r_L dt,   dp_{N-1} += r_R dt                            (boundaries)
/// dr_L = -gamma_L (r_L - lambda_L^2 q_0) dt + lambda_L sqrt(2 gamma_L T_L) dW
/// dr_R = -gamma_R (r_R - lambda_R^2 q_{N-1}) dt + lambda_R sqrt(2 gamma_R T_R) dW
/// ```
///
/// Both the pinning potential `V1` and the coupling potential `V2` use the
/// chain's `(nu, theta)` pair.
pub struct HeatStepper {
    n: usize,
    mass_inv: f64,
    nu: f64,
    theta: f64,
    dt: f64,
    bath: BathSpec,
    noise_l: f64,
    noise_r: f64,
    grad: Vec<f64>,
}

impl HeatStepper {
    pub fn new(spec: &ChainSpec, dt: f64) -> Result<Self, McError> {
        if spec.kind != ModelKind::HeatConduction {
            return Err(McError::Chain(PolyError::UnsupportedModel {
                required: "heat-conduction",
                got: "fpu-langevin",
            }));
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(McError::InvalidEnsemble(format!(
                "step size must be positive, got {dt}"
            )));
        }
        let bath = spec.bath.expect("validated heat spec has bath parameters");
        Ok(HeatStepper {
            n: spec.n_sites,
            mass_inv: 1.0 / spec.mass,
            nu: spec.nu,
            theta: spec.theta,
            dt,
            bath,
            noise_l: bath.lambda_left * (2.0 * bath.gamma_left * bath.t_left).sqrt() * dt.sqrt(),
            noise_r: bath.lambda_right * (2.0 * bath.gamma_right * bath.t_right).sqrt()
                * dt.sqrt(),
            grad: vec![0.0; spec.n_sites + 1],
        })
    }

    #[inline]
    fn dv(&self, x: f64) -> f64 {
        self.nu * x + self.theta * x * x * x
    }

    pub fn step(
        &mut self,
        q: &mut [f64],
        p: &mut [f64],
        bath_l: &mut f64,
        bath_r: &mut f64,
        rng: &mut impl Rng,
    ) {
        let n = self.n;
        // grad[i] = V2'(q_i - q_{i-1}) for i = 1..n-1; ends unused.
        for i in 1..n {
            self.grad[i] = self.dv(q[i] - q[i - 1]);
        }
        let dt = self.dt;
        // All increments from the pre-step state.
        let drift_l = -self.bath.gamma_left * (*bath_l - self.bath.lambda_left.powi(2) * q[0]);
        let drift_r =
            -self.bath.gamma_right * (*bath_r - self.bath.lambda_right.powi(2) * q[n - 1]);
        let bath_l_force = *bath_l;
        let bath_r_force = *bath_r;
        for i in 0..n {
            let mut f = -self.dv(q[i]); // pinning force -V1'(q_i)
            if i > 0 {
                f -= self.grad[i];
            }
            if i + 1 < n {
                f += self.grad[i + 1];
            }
            q[i] += p[i] * (self.mass_inv * dt);
            p[i] += f * dt;
        }
        p[0] += bath_l_force * dt;
        p[n - 1] += bath_r_force * dt;
        *bath_l += drift_l * dt + self.noise_l * rng.sample::<f64, _>(StandardNormal);
        *bath_r += drift_r * dt + self.noise_r * rng.sample::<f64, _>(StandardNormal);
    }
}
