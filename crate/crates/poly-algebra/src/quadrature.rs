use crate::error::PolyError;

/// Adaptive Simpson integration with a relative tolerance.
///
/// Subdivides until the Richardson error estimate on every panel is below
/// the local share of the tolerance; exceeding `max_depth` is reported as a
/// convergence failure instead of returning a silently degraded value.
pub fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_depth: u32,
) -> Result<f64, PolyError> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    // Scale the panel tolerance by a first guess of the magnitude; the floor
    // stops subdivision from chasing tolerances below machine noise.
    let scale = whole.abs().max(1e-300);
    let floor = f64::EPSILON * scale;
    let v = recurse(f, a, b, fa, fm, fb, whole, rel_tol * scale, floor, max_depth)?;
    if !v.is_finite() {
        return Err(PolyError::NonFinite("adaptive Simpson quadrature"));
    }
    Ok(v)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    floor: f64,
    depth: u32,
) -> Result<f64, PolyError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps.max(floor) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(PolyError::Quadrature(format!(
            "panel [{a}, {b}] did not converge (residual {:.3e})",
            delta.abs()
        )));
    }
    let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, floor, depth - 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, floor, depth - 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 40).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
        let v = adaptive_simpson(&|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-12, 40).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn reports_non_convergence() {
        // A needle far too sharp for the allowed depth.
        let needle = |x: f64| (-(x * 1e8).powi(2)).exp();
        let err = adaptive_simpson(&needle, -1.0, 1.0, 1e-14, 3).unwrap_err();
        assert!(matches!(err, PolyError::Quadrature(_)));
    }
}
