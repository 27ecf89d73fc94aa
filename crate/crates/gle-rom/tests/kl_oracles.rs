//! Spectral oracles for the covariance eigenproblem: the exponential
//! kernel's transcendental eigenvalue equation, reconstruction error
//! against the discarded tail, and the sampled fluctuation covariance.

use gle_rom::{kl_decompose, sample_fluctuation};
use mc_sim::SampledFunction;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Eigenvalues of the integral operator with kernel `exp(-c|t-s|)` on an
/// interval of length `T`: `lambda = 2c/(w^2 + c^2)` where `w` runs over
/// the interleaved roots of `tan(w a) = c/w` (even modes) and
/// `tan(w a) = -w/c` (odd modes), `a = T/2`.
fn exponential_kernel_spectrum(c: f64, t_total: f64, count: usize) -> Vec<f64> {
    let a = 0.5 * t_total;
    let mut omegas: Vec<f64> = Vec::new();
    let bisect = |f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64| -> f64 {
        let (flo, fhi) = (f(lo), f(hi));
        assert!(
            flo.signum() != fhi.signum(),
            "no sign change on [{lo}, {hi}]"
        );
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let eps = 1e-9;
    for k in 0..count {
        let branch_lo = (k as f64 * std::f64::consts::PI) / a;
        let branch_hi = ((k as f64 + 0.5) * std::f64::consts::PI) / a;
        // Even family: tan(w a) - c/w = 0 inside (branch_lo, branch_hi).
        let even = |w: f64| (w * a).tan() - c / w;
        omegas.push(bisect(&even, branch_lo + eps, branch_hi - eps));
        // Odd family: tan(w a) + w/c = 0 inside (branch_hi, branch_lo + pi).
        let odd = |w: f64| (w * a).tan() + w / c;
        let next_lo = branch_hi + eps;
        let next_hi = ((k as f64 + 1.0) * std::f64::consts::PI) / a - eps;
        omegas.push(bisect(&odd, next_lo, next_hi));
    }
    let mut lambdas: Vec<f64> = omegas
        .iter()
        .map(|w| 2.0 * c / (w * w + c * c))
        .collect();
    lambdas.sort_by(|x, y| y.total_cmp(x));
    lambdas.truncate(count);
    lambdas
}

#[test]
fn exponential_covariance_matches_transcendental_spectrum() {
    let (c, t_total, n) = (1.0, 2.0, 2048);
    let dt = t_total / (n - 1) as f64;
    let values: Vec<f64> = (0..n).map(|i| (-c * dt * i as f64).exp()).collect();
    let cov = SampledFunction::new(0.0, dt, values).unwrap();
    let kl = kl_decompose(&cov, 8).unwrap();
    let exact = exponential_kernel_spectrum(c, t_total, 8);
    for (k, (got, want)) in kl.eigenvalues().iter().zip(&exact).enumerate() {
        assert!(
            (got - want).abs() < 1e-4,
            "mode {k}: {got} vs transcendental {want}"
        );
    }
}

#[test]
fn truncated_reconstruction_is_bounded_by_the_discarded_tail() {
    let (c, t_total, n) = (0.7, 3.0, 256);
    let dt = t_total / (n - 1) as f64;
    let values: Vec<f64> = (0..n).map(|i| (-c * dt * i as f64).exp()).collect();
    let cov = SampledFunction::new(0.0, dt, values).unwrap();
    let keep = 24;
    let full = kl_decompose(&cov, n).unwrap();
    let kl = kl_decompose(&cov, keep).unwrap();
    // Weighted Frobenius norm of the truncation residual equals the l2 norm
    // of the discarded eigenvalues; check the bound with a small cushion
    // for the clipped near-zero modes.
    let tail_sq: f64 = full.eigenvalues()[keep..].iter().map(|l| l * l).sum();
    let w: Vec<f64> = {
        let mut w = vec![dt; n];
        w[0] = 0.5 * dt;
        w[n - 1] = 0.5 * dt;
        w
    };
    let mut resid_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            let truth = cov.values()[i.abs_diff(j)];
            let approx = kl.reconstructed_covariance(i, j);
            resid_sq += w[i] * w[j] * (truth - approx) * (truth - approx);
        }
    }
    assert!(
        resid_sq <= tail_sq * 1.0001 + 1e-12,
        "residual^2 {resid_sq:.3e} above tail bound {tail_sq:.3e}"
    );
    assert!(
        resid_sq >= tail_sq * 0.9,
        "residual^2 {resid_sq:.3e} suspiciously below its tail identity {tail_sq:.3e}"
    );
}

#[test]
fn sampled_fluctuations_reproduce_the_truncated_covariance() {
    let (c, t_total, n) = (1.0, 2.0, 128);
    let dt = t_total / (n - 1) as f64;
    let values: Vec<f64> = (0..n).map(|i| (-c * dt * i as f64).exp()).collect();
    let cov = SampledFunction::new(0.0, dt, values).unwrap();
    let kl = kl_decompose(&cov, 16).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    let draws = 10_000;
    let checks = [(0usize, 0usize), (0, 64), (32, 96), (127, 127), (10, 11)];
    let mut acc = [0.0f64; 5];
    let mut acc_sq = [0.0f64; 5];
    for _ in 0..draws {
        let f = sample_fluctuation(&kl, &mut rng);
        let v = f.values();
        for (slot, &(i, j)) in checks.iter().enumerate() {
            let prod = v[i] * v[j];
            acc[slot] += prod;
            acc_sq[slot] += prod * prod;
        }
    }
    for (slot, &(i, j)) in checks.iter().enumerate() {
        let mean = acc[slot] / draws as f64;
        let var = acc_sq[slot] / draws as f64 - mean * mean;
        let sigma = (var / draws as f64).sqrt();
        let expect = kl.reconstructed_covariance(i, j);
        assert!(
            (mean - expect).abs() < 4.0 * sigma,
            "cov({i},{j}): {mean} vs {expect} (sigma {sigma:.2e})"
        );
    }
}
