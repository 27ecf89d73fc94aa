//! Bessel functions of the first kind for the spectral-domain temporal
//! basis. Ascending series for small arguments, Miller's downward
//! recurrence elsewhere.

/// `J_n(x)` for integer order `n >= 0`; finite for every finite `x`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    bessel_j_sequence(n as usize, x)[n as usize]
}

/// `[J_0(x), ..., J_{n_max}(x)]` in one pass.
pub fn bessel_j_sequence(n_max: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    if x < 0.0 {
        // J_n(-x) = (-1)^n J_n(x)
        let mut out = bessel_j_sequence(n_max, -x);
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
        return out;
    }
    if x <= SERIES_LIMIT {
        (0..=n_max).map(|n| series(n, x)).collect()
    } else {
        miller(n_max, x)
    }
}

/// Below this argument the alternating series loses fewer than three digits
/// and stays well inside 1e-12 relative accuracy.
const SERIES_LIMIT: f64 = 9.0;

fn series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    // term_0 = (x/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let h2 = half * half;
    for k in 1..200 {
        term *= -h2 / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    sum
}

fn miller(n_max: usize, x: f64) -> Vec<f64> {
    // Start the downward recurrence well above both the order and the
    // turning point x, then normalize with J_0 + 2 sum J_{2k} = 1.
    let top = x.max(n_max as f64);
    let start = (top as usize + 24 + 2 * (40.0 * top).sqrt() as usize + 1) & !1usize;
    let mut out = vec![0.0; n_max + 1];
    let mut jp1 = 0.0f64; // J_{k+1}
    let mut jk = 1e-30f64; // J_k, with k = start initially
    let mut norm = 2.0 * jk; // start is even and > 0
    if start <= n_max {
        out[start] = jk;
    }
    for k in (1..=start).rev() {
        let jm1 = (2.0 * k as f64 / x) * jk - jp1;
        jp1 = jk;
        jk = jm1;
        // jk now holds J_{k-1}
        let ord = k - 1;
        if ord % 2 == 0 {
            norm += if ord == 0 { jk } else { 2.0 * jk };
        }
        if ord <= n_max {
            out[ord] = jk;
        }
        if jk.abs() > 1e250 {
            let s = 1e-250;
            jk *= s;
            jp1 *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}
