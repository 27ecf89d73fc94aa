use serde::{Deserialize, Serialize};

use crate::error::McError;
use crate::sampled::SampledFunction;
use crate::stats::mean;

/// Fitted exponential envelope `amplitude * exp(-rate * t)` bounding a
/// normalized signal from above.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub amplitude: f64,
    pub rate: f64,
    pub points_used: usize,
    pub noise_floor: f64,
}

/// Fits `c exp(-alpha t)` to the running maximum envelope of
/// `|f(t)/f(0)|`.
///
/// The envelope at `t_i` is `max_{j >= i} |f_j / f_0|`, which is
/// non-increasing by construction; a least-squares line through its
/// logarithm, restricted to the window where the envelope exceeds the noise
/// floor (`floor_factor` times the trailing-tenth standard deviation),
/// gives `(c, alpha)`. A non-positive fitted rate is reported as "no
/// exponential decay observed" rather than returned.
pub fn fit_exponential_bound(
    f: &SampledFunction,
    floor_factor: f64,
) -> Result<DecayFit, McError> {
    let f0 = f.first();
    if f0 == 0.0 {
        return Err(McError::InvalidSampledFunction(
            "envelope fit needs f(0) != 0".into(),
        ));
    }
    let normalized: Vec<f64> = f.values().iter().map(|v| (v / f0).abs()).collect();
    let n = normalized.len();
    if n < 4 {
        return Err(McError::InvalidSampledFunction(
            "envelope fit needs at least 4 samples".into(),
        ));
    }
    // Running maximum from the right.
    let mut envelope = normalized.clone();
    for i in (0..n - 1).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }
    // Noise floor from the trailing tenth of the raw normalized signal.
    let tail_start = n - (n / 10).max(2);
    let tail = &normalized[tail_start..];
    let tail_mean = mean(tail);
    let tail_std = (mean(&tail.iter().map(|v| (v - tail_mean) * (v - tail_mean)).collect::<Vec<_>>()))
        .sqrt();
    let noise_floor = floor_factor * tail_std;

    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for (i, &e) in envelope.iter().enumerate() {
        if e > noise_floor && e > 0.0 {
            ts.push(f.time(i));
            logs.push(e.ln());
        }
    }
    if ts.len() < 2 {
        return Err(McError::NoDecayObserved(format!(
            "only {} envelope points above the noise floor {noise_floor:.3e}",
            ts.len()
        )));
    }
    let (slope, intercept) = least_squares_line(&ts, &logs);
    if !slope.is_finite() || slope >= 0.0 {
        return Err(McError::NoDecayObserved(format!(
            "envelope fit slope {slope:.3e} is not negative"
        )));
    }
    Ok(DecayFit {
        // Back to the unnormalized scale: the bound is on |f(t)| itself.
        amplitude: intercept.exp() * f0.abs(),
        rate: -slope,
        points_used: ts.len(),
        noise_floor,
    })
}

fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return (0.0, my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
