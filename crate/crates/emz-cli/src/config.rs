use std::path::Path;

use mc_sim::{EnsembleSpec, InitialCondition, Observable, StoreFormat};
use poly_algebra::{BathSpec, ChainSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Typed run configuration, one flat key-value section per concern.
/// Unknown keys are rejected so that misspellings never silently fall back
/// to defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    pub model: ModelSection,
    #[serde(default)]
    pub ensemble: Option<EnsembleSection>,
    #[serde(default)]
    pub basis: Option<BasisSection>,
    #[serde(default)]
    pub fit: Option<FitSection>,
    #[serde(default)]
    pub rom: Option<RomSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ModelSection {
    #[serde(default = "default_kind")]
    pub kind: String,
    pub n_sites: usize,
    #[serde(default = "one")]
    pub mass: f64,
    pub nu: f64,
    pub theta: f64,
    #[serde(default = "one")]
    pub beta: f64,
    /// Uniform per-site friction; exclusive with the single-site pair.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub gamma_site: Option<usize>,
    #[serde(default)]
    pub gamma_value: Option<f64>,
    /// Tagged observable, e.g. `p[50]`.
    pub observable: String,
    // Heat-conduction bath parameters.
    #[serde(default)]
    pub t_left: Option<f64>,
    #[serde(default)]
    pub t_right: Option<f64>,
    #[serde(default)]
    pub gamma_left: Option<f64>,
    #[serde(default)]
    pub gamma_right: Option<f64>,
    #[serde(default)]
    pub lambda_left: Option<f64>,
    #[serde(default)]
    pub lambda_right: Option<f64>,
}

fn default_kind() -> String {
    "fpu-langevin".into()
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct EnsembleSection {
    pub paths: usize,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    #[serde(default = "default_initial")]
    pub initial: String,
    #[serde(default)]
    pub beta0: Option<f64>,
    #[serde(default)]
    pub point_state: Option<Vec<f64>>,
    #[serde(default = "one_usize")]
    pub save_every: usize,
    #[serde(default = "default_format")]
    pub store_format: String,
}

fn default_initial() -> String {
    "gibbs".into()
}

fn one_usize() -> usize {
    1
}

fn default_format() -> String {
    "binary".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BasisSection {
    pub kind: String,
    pub order: usize,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub sigma: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FitSection {
    #[serde(default)]
    pub method: Option<String>,
    #[serde(default)]
    pub lambda_grid: Option<Vec<f64>>,
    /// Streaming coefficient for the data-driven regression: a number, or
    /// "streaming" to evaluate it from the generator.
    #[serde(default)]
    pub omega: Option<toml::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RomSection {
    pub paths: usize,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub modes: usize,
    #[serde(default = "one_usize")]
    pub save_every: usize,
}

impl Config {
    /// Parses the file, applies `--set key.path=value` overrides, then
    /// deserializes with unknown keys rejected.
    pub fn load(path: &Path, overrides: &[String]) -> Result<(Config, String)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut value: toml::Value = text
            .parse()
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for item in overrides {
            apply_override(&mut value, item)?;
        }
        let resolved = toml::to_string_pretty(&value)
            .map_err(|e| CliError::Config(format!("cannot reserialize config: {e}")))?;
        let config: Config = toml::from_str(&resolved)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok((config, resolved))
    }

    pub fn chain_spec(&self) -> Result<ChainSpec> {
        let m = &self.model;
        let spec = match m.kind.as_str() {
            "fpu-langevin" => {
                let gamma = match (m.gamma, m.gamma_site, m.gamma_value) {
                    (Some(g), None, None) => vec![g; m.n_sites],
                    (None, Some(site), Some(value)) => {
                        let mut g = vec![0.0; m.n_sites];
                        if site >= m.n_sites {
                            return Err(CliError::Config(format!(
                                "gamma-site {site} out of range for {} sites",
                                m.n_sites
                            )));
                        }
                        g[site] = value;
                        g
                    }
                    _ => {
                        return Err(CliError::Config(
                            "friction: set `gamma` (uniform) or both `gamma-site` and \
                             `gamma-value` (single site)"
                                .into(),
                        ))
                    }
                };
                ChainSpec::fpu(m.n_sites, m.mass, m.nu, m.theta, m.beta, gamma)
                    .map_err(|e| CliError::Config(e.to_string()))?
            }
            "heat-conduction" => {
                let need = |v: Option<f64>, name: &str| {
                    v.ok_or_else(|| {
                        CliError::Config(format!("heat-conduction model requires `{name}`"))
                    })
                };
                let bath = BathSpec {
                    t_left: need(m.t_left, "t-left")?,
                    t_right: need(m.t_right, "t-right")?,
                    gamma_left: need(m.gamma_left, "gamma-left")?,
                    gamma_right: need(m.gamma_right, "gamma-right")?,
                    lambda_left: need(m.lambda_left, "lambda-left")?,
                    lambda_right: need(m.lambda_right, "lambda-right")?,
                };
                ChainSpec::heat_conduction(m.n_sites, m.mass, m.nu, m.theta, bath)
                    .map_err(|e| CliError::Config(e.to_string()))?
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown model kind `{other}` (expected `fpu-langevin` or `heat-conduction`)"
                )))
            }
        };
        Ok(spec)
    }

    pub fn observable(&self) -> Result<Observable> {
        self.model
            .observable
            .parse()
            .map_err(|e: String| CliError::Config(format!("observable: {e}")))
    }

    pub fn ensemble_spec(&self, seed_override: Option<u64>) -> Result<EnsembleSpec> {
        let e = self
            .ensemble
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [ensemble] section".into()))?;
        let initial = match e.initial.as_str() {
            "gibbs" => InitialCondition::Gibbs,
            "gibbs-at-beta" => InitialCondition::GibbsAtBeta {
                beta0: e.beta0.ok_or_else(|| {
                    CliError::Config("initial `gibbs-at-beta` requires `beta0`".into())
                })?,
            },
            "point" => InitialCondition::Point {
                state: e.point_state.clone().ok_or_else(|| {
                    CliError::Config("initial `point` requires `point-state`".into())
                })?,
            },
            other => {
                return Err(CliError::Config(format!(
                    "unknown initial condition `{other}`"
                )))
            }
        };
        Ok(EnsembleSpec {
            paths: e.paths,
            dt: e.dt,
            t_end: e.t_end,
            seed: seed_override.unwrap_or(e.seed),
            initial,
            save_every: e.save_every,
        })
    }

    pub fn store_format(&self) -> Result<StoreFormat> {
        let e = self
            .ensemble
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [ensemble] section".into()))?;
        match e.store_format.as_str() {
            "binary" => Ok(StoreFormat::Binary),
            "csv" => Ok(StoreFormat::Csv),
            other => Err(CliError::Config(format!("unknown store format `{other}`"))),
        }
    }
}

fn apply_override(value: &mut toml::Value, item: &str) -> Result<()> {
    let (path, raw) = item.split_once('=').ok_or_else(|| {
        CliError::Config(format!("override `{item}` is not of the form key.path=value"))
    })?;
    // Interpret the right-hand side as a TOML literal; anything that does
    // not parse as one is taken as a bare string.
    let parsed: toml::Value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut table) => table.remove("v").expect("key v was just inserted"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let mut cursor = value;
    let parts: Vec<&str> = path.trim().split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let table = cursor.as_table_mut().ok_or_else(|| {
            CliError::Config(format!("override `{path}`: `{part}` is not a table"))
        })?;
        if i + 1 == parts.len() {
            table.insert(part.to_string(), parsed);
            return Ok(());
        }
        cursor = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    unreachable!("split produced at least one part")
}
