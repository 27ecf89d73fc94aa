use std::collections::HashMap;
use std::sync::Mutex;

use smallvec::SmallVec;

use crate::chain::{ChainSpec, ModelKind};
use crate::error::PolyError;
use crate::monomial::{Monomial, Var};
use crate::poly::SparsePoly;
use crate::quadrature::adaptive_simpson;

const MOMENT_REL_TOL: f64 = 1e-12;
const MOMENT_MAX_DEPTH: u32 = 48;
/// Integration window grows until the integrand falls below this fraction
/// of its peak.
const TAIL_CUTOFF: f64 = 1e-16;

/// The factorized equilibrium measure of the periodic chain: momenta are
/// i.i.d. centered Gaussians with variance `m/beta`, extensions are i.i.d.
/// with density proportional to `exp(-beta V(r))`.
///
/// One-dimensional extension moments are evaluated by adaptive quadrature
/// (closed form when `theta = 0`) and memoized per exponent. The memo table
/// is behind a mutex, so a single instance can serve concurrent callers.
pub struct GibbsMeasure {
    mass: f64,
    nu: f64,
    theta: f64,
    beta: f64,
    r_moments: Mutex<HashMap<u32, f64>>,
}

impl GibbsMeasure {
    pub fn new(spec: &ChainSpec) -> Result<Self, PolyError> {
        if spec.kind != ModelKind::FpuLangevin {
            return Err(PolyError::UnsupportedModel {
                required: "fpu-langevin",
                got: "heat-conduction",
            });
        }
        spec.validate()?;
        Ok(GibbsMeasure {
            mass: spec.mass,
            nu: spec.nu,
            theta: spec.theta,
            beta: spec.beta,
            r_moments: Mutex::new(HashMap::new()),
        })
    }

    /// `<p^s>`: zero for odd `s`, `(m/beta)^{s/2} (s-1)!!` for even `s`.
    pub fn p_moment(&self, s: u32) -> f64 {
        if s % 2 == 1 {
            return 0.0;
        }
        let ratio = self.mass / self.beta;
        let mut acc = 1.0;
        let mut odd = 1.0;
        for _ in 0..s / 2 {
            acc *= ratio * odd;
            odd += 2.0;
        }
        acc
    }

    /// `<r^m>` under `exp(-beta V)`: zero for odd `m`; Gaussian closed form
    /// when `theta = 0`, quadrature otherwise.
    pub fn r_moment(&self, m: u32) -> Result<f64, PolyError> {
        if m % 2 == 1 {
            return Ok(0.0);
        }
        if m == 0 {
            return Ok(1.0);
        }
        if self.theta == 0.0 {
            let ratio = 1.0 / (self.beta * self.nu);
            let mut acc = 1.0;
            let mut odd = 1.0;
            for _ in 0..m / 2 {
                acc *= ratio * odd;
                odd += 2.0;
            }
            return Ok(acc);
        }
        if let Some(&v) = self.r_moments.lock().unwrap().get(&m) {
            return Ok(v);
        }
        let v = self.weighted_power_integral(m)? / self.weighted_power_integral(0)?;
        self.r_moments.lock().unwrap().insert(m, v);
        Ok(v)
    }

    /// `2 * int_0^R r^m exp(-beta V(r)) dr` with R past the tail cutoff.
    fn weighted_power_integral(&self, m: u32) -> Result<f64, PolyError> {
        let beta = self.beta;
        let nu = self.nu;
        let theta = self.theta;
        let f = move |r: f64| r.powi(m as i32) * (-beta * (0.5 * nu * r * r + 0.25 * theta * r.powi(4))).exp();
        // Peak of r^m exp(-beta V): m = beta (nu r^2 + theta r^4).
        let r_peak = if m == 0 {
            0.0
        } else {
            let disc = nu * nu + 4.0 * theta * m as f64 / beta;
            (((disc.sqrt() - nu) / (2.0 * theta)).max(0.0)).sqrt()
        };
        let peak_val = f(r_peak.max(1e-12)).max(f64::MIN_POSITIVE);
        let mut cut = r_peak + 1.0;
        while f(cut) > TAIL_CUTOFF * peak_val {
            cut *= 1.5;
            if !cut.is_finite() {
                return Err(PolyError::NonFinite("extension moment tail search"));
            }
        }
        let v = 2.0 * adaptive_simpson(&f, 0.0, cut, MOMENT_REL_TOL, MOMENT_MAX_DEPTH)?;
        if !v.is_finite() {
            return Err(PolyError::NonFinite("extension moment integral"));
        }
        Ok(v)
    }

    fn moment_of(&self, var: Var, exp: u32) -> Result<f64, PolyError> {
        if var.is_momentum() {
            Ok(self.p_moment(exp))
        } else {
            self.r_moment(exp)
        }
    }

    /// Expectation of a polynomial under the product measure; exact zero for
    /// every term containing an odd power.
    pub fn expectation(&self, poly: &SparsePoly) -> Result<f64, PolyError> {
        let mut sum = NeumaierSum::new();
        for (mono, coeff) in poly.iter() {
            if !mono.parity_signature().is_empty() {
                continue;
            }
            let mut term = coeff;
            for &(v, e) in mono.factors() {
                term *= self.moment_of(v, e as u32)?;
            }
            sum.add(term);
        }
        Ok(sum.value())
    }

    /// `<f g>` without forming the product polynomial. Terms are bucketed by
    /// parity signature: a pair contributes only when every variable's summed
    /// exponent is even, i.e. when the signatures coincide.
    pub fn product_expectation(&self, f: &SparsePoly, g: &SparsePoly) -> Result<f64, PolyError> {
        type Signature = SmallVec<[Var; 6]>;
        let mut buckets: HashMap<Signature, Vec<(&Monomial, f64)>> = HashMap::new();
        for (m, c) in g.iter() {
            buckets.entry(m.parity_signature()).or_default().push((m, c));
        }
        let mut sum = NeumaierSum::new();
        for (mf, cf) in f.iter() {
            let Some(partners) = buckets.get(&mf.parity_signature()) else {
                continue;
            };
            for &(mg, cg) in partners {
                let mut term = cf * cg;
                if term == 0.0 {
                    continue;
                }
                let (a, b) = (mf.factors(), mg.factors());
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].0.cmp(&b[j].0) {
                        std::cmp::Ordering::Less => {
                            term *= self.moment_of(a[i].0, a[i].1 as u32)?;
                            i += 1;
                        }
                        std::cmp::Ordering::Greater => {
                            term *= self.moment_of(b[j].0, b[j].1 as u32)?;
                            j += 1;
                        }
                        std::cmp::Ordering::Equal => {
                            term *= self.moment_of(a[i].0, (a[i].1 + b[j].1) as u32)?;
                            i += 1;
                            j += 1;
                        }
                    }
                }
                for &(v, e) in &a[i..] {
                    term *= self.moment_of(v, e as u32)?;
                }
                for &(v, e) in &b[j..] {
                    term *= self.moment_of(v, e as u32)?;
                }
                sum.add(term);
            }
        }
        Ok(sum.value())
    }

    /// `<f^2>`.
    pub fn norm_sq(&self, f: &SparsePoly) -> Result<f64, PolyError> {
        self.product_expectation(f, f)
    }
}

/// Gibbs expectation of a polynomial observable for a chain spec. Builds a
/// transient [`GibbsMeasure`]; hold one yourself when evaluating repeatedly.
pub fn gibbs_expectation(poly: &SparsePoly, spec: &ChainSpec) -> Result<f64, PolyError> {
    GibbsMeasure::new(spec)?.expectation(poly)
}

/// Compensated (Neumaier) summation; keeps long reductions accurate
/// independently of term ordering.
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        NeumaierSum { sum: 0.0, comp: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Default for NeumaierSum {
    fn default() -> Self {
        Self::new()
    }
}
