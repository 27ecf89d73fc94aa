use crate::error::McError;
use crate::sampled::SampledFunction;
use crate::stats::{mean, variance};

/// Number of evaluation points of the density grid.
pub const KDE_GRID: usize = 512;

/// Gaussian-kernel density estimate with Silverman's bandwidth
/// `1.06 sigma n^{-1/5}` on a 512-point grid spanning `mean +- 5 sigma`.
pub fn kde_marginal(samples: &[f64]) -> Result<SampledFunction, McError> {
    if samples.len() < 100 {
        return Err(McError::TooFewSamples {
            needed: 100,
            got: samples.len(),
        });
    }
    let m = mean(samples);
    let sigma = variance(samples).sqrt();
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(McError::DegenerateSample);
    }
    let n = samples.len() as f64;
    let bandwidth = 1.06 * sigma * n.powf(-0.2);
    let x0 = m - 5.0 * sigma;
    let dx = 10.0 * sigma / (KDE_GRID - 1) as f64;
    let norm = 1.0 / (n * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let inv_two_h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    let values: Vec<f64> = (0..KDE_GRID)
        .map(|i| {
            let x = x0 + dx * i as f64;
            let mut acc = 0.0;
            for &s in samples {
                let d = x - s;
                acc += (-d * d * inv_two_h2).exp();
            }
            acc * norm
        })
        .collect();
    // The sampled-function container doubles as a density on an x-grid.
    SampledFunction::new(x0, dx, values)
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn standard_normal_density_within_sup_band() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let kde = kde_marginal(&samples).unwrap();
        let mut worst = 0.0f64;
        for (x, d) in kde.iter_points() {
            let exact = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
            worst = worst.max((d - exact).abs());
        }
        assert!(worst < 0.02, "sup error {worst}");
    }

    #[test]
    fn kde_of_symmetric_data_is_symmetric() {
        let mut rng = ChaCha12Rng::seed_from_u64(18);
        let mut samples: Vec<f64> = Vec::new();
        for _ in 0..5000 {
            let x: f64 = rng.sample(StandardNormal);
            samples.push(x);
            samples.push(-x);
        }
        let kde = kde_marginal(&samples).unwrap();
        let v = kde.values();
        let n = v.len();
        let mut worst = 0.0f64;
        for i in 0..n / 2 {
            worst = worst.max((v[i] - v[n - 1 - i]).abs());
        }
        assert!(worst < 1e-6, "asymmetry {worst}");
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(matches!(
            kde_marginal(&[1.0; 50]),
            Err(McError::TooFewSamples { .. })
        ));
        assert!(matches!(
            kde_marginal(&[2.5; 200]),
            Err(McError::DegenerateSample)
        ));
    }

    #[test]
    fn ks_distance_basics() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        assert!(ks_distance(&a, &a) < 1e-12);
        let b: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        assert!(ks_distance(&a, &b) > 0.45);
    }
}
