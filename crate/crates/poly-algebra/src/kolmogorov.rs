use crate::chain::{ChainSpec, ModelKind};
use crate::error::PolyError;
use crate::monomial::Var;
use crate::poly::SparsePoly;

/// Guard against the degree explosion of repeated quartic-potential
/// applications; exceeding it is an explicit error, never a truncation.
pub const DEFAULT_MAX_TOTAL_DEGREE: u32 = 64;

/// Which generator to apply: the backward Kolmogorov operator
/// `K = L(p,r) + S(p)` or its equilibrium adjoint `K* = -L(p,r) + S(p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Adjoint,
}

/// Applies the chain generator to a polynomial observable, exactly.
///
/// The transport part acts as
/// `L = sum_j [ (V'(r_{j+1}) - V'(r_j)) d/dp_j + (p_j - p_{j-1})/m d/dr_j ]`
/// and the thermostat part as
/// `S = sum_j gamma_j [ -(p_j/m) d/dp_j + (1/beta) d^2/dp_j^2 ]`,
/// with `V'(x) = nu x + theta x^3` and all site indices mod `n_sites`.
pub fn apply_kolmogorov(
    poly: &SparsePoly,
    spec: &ChainSpec,
    direction: Direction,
) -> Result<SparsePoly, PolyError> {
    apply_kolmogorov_capped(poly, spec, direction, DEFAULT_MAX_TOTAL_DEGREE)
}

/// [`apply_kolmogorov`] with an explicit total-degree cap.
pub fn apply_kolmogorov_capped(
    poly: &SparsePoly,
    spec: &ChainSpec,
    direction: Direction,
    max_total_degree: u32,
) -> Result<SparsePoly, PolyError> {
    if spec.kind != ModelKind::FpuLangevin {
        return Err(PolyError::UnsupportedModel {
            required: "fpu-langevin",
            got: "heat-conduction",
        });
    }
    let transport_sign = match direction {
        Direction::Forward => 1.0,
        Direction::Adjoint => -1.0,
    };
    let n = spec.n_sites;
    let mass = spec.mass;
    let mut out = SparsePoly::zero();

    for (mono, coeff) in poly.iter() {
        let degree = mono.total_degree();
        // L_p raises the total degree by at most 2 (p -> r^3).
        if degree + 2 > max_total_degree {
            return Err(PolyError::DegreeOverflow {
                degree: degree + 2,
                cap: max_total_degree,
            });
        }
        for &(var, exp) in mono.factors() {
            let site = var.site();
            if site >= n {
                return Err(PolyError::unknown_var(var, n));
            }
            let e = exp as f64;
            if var.is_extension() {
                // (p_site - p_{site-1})/m d/dr_site
                let base = transport_sign * coeff * e / mass;
                let lowered = mono.times_power(var, -1);
                out.add_term(lowered.times_power(Var::p(site), 1), base);
                out.add_term(
                    lowered.times_power(Var::p(spec.site_down(site)), 1),
                    -base,
                );
            } else {
                // [nu (r_{site+1} - r_site) + theta (r_{site+1}^3 - r_site^3)] d/dp_site
                let base = transport_sign * coeff * e;
                let lowered = mono.times_power(var, -1);
                let up = spec.site_up(site);
                if spec.nu != 0.0 {
                    out.add_term(lowered.times_power(Var::r(up), 1), base * spec.nu);
                    out.add_term(lowered.times_power(Var::r(site), 1), -base * spec.nu);
                }
                if spec.theta != 0.0 {
                    out.add_term(lowered.times_power(Var::r(up), 3), base * spec.theta);
                    out.add_term(lowered.times_power(Var::r(site), 3), -base * spec.theta);
                }
                // gamma_site [ -(p_site/m) d/dp_site + (1/beta) d^2/dp_site^2 ]
                let g = spec.gamma[site];
                if g != 0.0 {
                    out.add_term(mono.clone(), -coeff * e * g / mass);
                    if exp >= 2 {
                        out.add_term(
                            mono.times_power(var, -2),
                            coeff * e * (e - 1.0) * g / spec.beta,
                        );
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Repeated application `K^n poly` (or the adjoint power).
pub fn kolmogorov_power(
    poly: &SparsePoly,
    spec: &ChainSpec,
    direction: Direction,
    n: usize,
) -> Result<SparsePoly, PolyError> {
    let mut cur = poly.clone();
    for _ in 0..n {
        cur = apply_kolmogorov(&cur, spec, direction)?;
    }
    Ok(cur)
}

/// Site windows that can carry support after `n` generator applications to
/// `r_j`: extensions live in `{j - floor(n/2), ..., j + floor(n/2)}` and
/// momenta in `{j - floor((n+1)/2), ..., j + floor((n-1)/2)}`, mod the chain
/// length. At `n = 0` the momentum window degenerates to the single
/// preceding site.
pub fn monomial_degree_window(n: usize, j: usize, n_sites: usize) -> (Vec<usize>, Vec<usize>) {
    let wrap = |k: i64| -> usize { (k.rem_euclid(n_sites as i64)) as usize };
    let jj = j as i64;
    let nn = n as i64;
    let r_sites: Vec<usize> = ((jj - nn / 2)..=(jj + nn / 2)).map(wrap).collect();
    let p_lo = jj - (nn + 1).div_euclid(2);
    let p_hi = jj + (nn - 1).div_euclid(2);
    let p_sites: Vec<usize> = if p_lo <= p_hi {
        (p_lo..=p_hi).map(wrap).collect()
    } else {
        vec![wrap(p_hi)]
    };
    (r_sites, p_sites)
}
