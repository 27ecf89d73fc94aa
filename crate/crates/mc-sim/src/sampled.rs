use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::McError;

/// A scalar function sampled on a uniform time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self, McError> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(McError::InvalidSampledFunction(format!(
                "grid spacing must be positive, got {dt}"
            )));
        }
        if values.is_empty() {
            return Err(McError::InvalidSampledFunction("no samples".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(McError::InvalidSampledFunction(format!(
                "non-finite value at index {i}"
            )));
        }
        Ok(SampledFunction { t0, dt, values })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.time(i), v))
    }

    /// Largest pointwise distance to `other` over the shared index range.
    pub fn sup_distance(&self, other: &SampledFunction) -> f64 {
        self.values
            .iter()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<SampledFunction, McError> {
        SampledFunction::new(self.t0, self.dt, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Keeps samples `0..n`.
    pub fn truncated(&self, n: usize) -> Result<SampledFunction, McError> {
        SampledFunction::new(self.t0, self.dt, self.values[..n.min(self.len())].to_vec())
    }

    /// Writes `t,value` rows preceded by `#`-prefixed comment lines.
    pub fn write_csv(&self, out: &mut dyn Write, comments: &[String]) -> Result<(), McError> {
        for line in comments {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "t,value")?;
        for (t, v) in self.iter_points() {
            writeln!(out, "{t:.12e},{v:.17e}")?;
        }
        Ok(())
    }

    /// Parses a `t,value` CSV (comments allowed), enforcing a uniform grid.
    pub fn read_csv(input: &mut dyn BufRead) -> Result<Self, McError> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('t') {
                continue;
            }
            let (t_str, v_str) = line.split_once(',').ok_or_else(|| {
                McError::InvalidSampledFunction(format!("expected `t,value`, got `{line}`"))
            })?;
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| {
                    McError::InvalidSampledFunction(format!("bad number `{s}`: {e}"))
                })
            };
            times.push(parse(t_str)?);
            values.push(parse(v_str)?);
        }
        if times.len() < 2 {
            return Err(McError::InvalidSampledFunction(
                "need at least two samples".into(),
            ));
        }
        let t0 = times[0];
        let dt = times[1] - times[0];
        if !dt.is_finite() || dt <= 0.0 {
            return Err(McError::InvalidSampledFunction(format!(
                "non-increasing time column (dt = {dt})"
            )));
        }
        for (i, &t) in times.iter().enumerate() {
            let expected = t0 + dt * i as f64;
            if (t - expected).abs() > 1e-6 * dt {
                return Err(McError::NonUniformGrid {
                    row: i,
                    expected,
                    got: t,
                });
            }
        }
        SampledFunction::new(t0, dt, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates() {
        assert!(SampledFunction::new(0.0, 0.0, vec![1.0]).is_err());
        assert!(SampledFunction::new(0.0, 0.1, vec![]).is_err());
        assert!(SampledFunction::new(0.0, 0.1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = SampledFunction::new(0.0, 0.25, vec![1.0, -0.5, 0.125, 3.0e-15]).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf, &["manifest 1234abcd".into()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# manifest 1234abcd\nt,value\n"));
        let back = SampledFunction::read_csv(&mut &buf[..]).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn non_uniform_grid_is_rejected() {
        let data = b"t,value\n0.0,1.0\n0.1,2.0\n0.3,3.0\n";
        let err = SampledFunction::read_csv(&mut &data[..]).unwrap_err();
        assert!(matches!(err, McError::NonUniformGrid { row: 2, .. }));
    }
}
