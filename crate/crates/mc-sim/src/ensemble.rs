use std::io::{Read, Write};
use std::path::Path;

use poly_algebra::{ChainSpec, ModelKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::McError;
use crate::fpu::{sample_gibbs_initial, FpuStepper};
use crate::heat::HeatStepper;
use crate::observable::Observable;
use crate::state::ChainState;

/// How ensemble paths are initialized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum InitialCondition {
    /// Exact equilibrium draw at the chain's `beta`.
    Gibbs,
    /// Equilibrium draw at a different inverse temperature.
    GibbsAtBeta { beta0: f64 },
    /// Fixed phase-space point (flattened coordinates).
    Point { state: Vec<f64> },
}

/// Ensemble description: path count, step size, horizon, master seed,
/// initial-condition mode, and the save stride for recorded observables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub paths: usize,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub initial: InitialCondition,
    #[serde(default = "default_stride")]
    pub save_every: usize,
}

fn default_stride() -> usize {
    1
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), McError> {
        if self.paths == 0 {
            return Err(McError::InvalidEnsemble("need at least one path".into()));
        }
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(McError::InvalidEnsemble(format!(
                "step size must be positive, got {}",
                self.dt
            )));
        }
        if self.t_end < self.dt {
            return Err(McError::InvalidEnsemble(format!(
                "horizon {} is shorter than one step {}",
                self.t_end, self.dt
            )));
        }
        if self.save_every == 0 {
            return Err(McError::InvalidEnsemble("save stride must be >= 1".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn n_saved(&self) -> usize {
        self.n_steps() / self.save_every + 1
    }
}

/// Per-path generator: one ChaCha stream per path index off the master
/// seed, so results are independent of scheduling and worker count.
pub fn path_rng(master_seed: u64, path: usize) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    let mut x = master_seed;
    for chunk in key.chunks_mut(8) {
        x = splitmix64(x);
        chunk.copy_from_slice(&x.to_le_bytes());
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(path as u64 + 1);
    rng
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Recorded observables of a full ensemble on the saved time grid, plus the
/// provenance needed to reproduce it.
#[derive(Clone, Debug)]
pub struct TrajectoryStore {
    pub chain: ChainSpec,
    pub ensemble: EnsembleSpec,
    pub observables: Vec<Observable>,
    /// paths-major storage; each path row is observable-major over saved times.
    data: Vec<f64>,
}

impl TrajectoryStore {
    /// Wraps externally produced per-path series (reduced-order models,
    /// surrogates) in the trajectory-store format, so every statistics
    /// operation applies unchanged. `data` is paths-major, each row
    /// observable-major over the saved grid.
    pub fn from_paths(
        chain: ChainSpec,
        ensemble: EnsembleSpec,
        observables: Vec<Observable>,
        data: Vec<f64>,
    ) -> Result<Self, McError> {
        ensemble.validate()?;
        let expected = ensemble.paths * observables.len() * ensemble.n_saved();
        if data.len() != expected {
            return Err(McError::InvalidEnsemble(format!(
                "store data has {} values, dimensions imply {expected}",
                data.len()
            )));
        }
        Ok(TrajectoryStore {
            chain,
            ensemble,
            observables,
            data,
        })
    }

    pub fn paths(&self) -> usize {
        self.ensemble.paths
    }

    pub fn n_saved(&self) -> usize {
        self.ensemble.n_saved()
    }

    /// Spacing of the saved grid.
    pub fn dt_saved(&self) -> f64 {
        self.ensemble.dt * self.ensemble.save_every as f64
    }

    pub fn observable_index(&self, obs: &Observable) -> Option<usize> {
        self.observables.iter().position(|o| o == obs)
    }

    /// One path's series for one recorded observable.
    pub fn series(&self, path: usize, obs_idx: usize) -> &[f64] {
        let nt = self.n_saved();
        let row = path * self.observables.len() * nt + obs_idx * nt;
        &self.data[row..row + nt]
    }

    /// All recorded values of one observable at one saved time, across paths.
    pub fn at_time(&self, obs_idx: usize, k: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.paths()).map(move |p| self.series(p, obs_idx)[k])
    }

    /// Every recorded sample of one observable (all paths, all times).
    pub fn pooled(&self, obs_idx: usize) -> Vec<f64> {
        (0..self.paths())
            .flat_map(|p| self.series(p, obs_idx).iter().copied())
            .collect()
    }
}

/// Runs `ens.paths` independent trajectories of the chain and records the
/// requested observables every `save_every` steps. Paths are simulated in
/// parallel; output is bit-identical for a fixed seed regardless of the
/// number of workers.
pub fn simulate_ensemble(
    spec: &ChainSpec,
    ens: &EnsembleSpec,
    observables: &[Observable],
) -> Result<TrajectoryStore, McError> {
    spec.validate().map_err(McError::Chain)?;
    ens.validate()?;
    if observables.is_empty() {
        return Err(McError::InvalidEnsemble("no observables requested".into()));
    }
    for obs in observables {
        obs.check_compatible(spec.kind, spec.n_sites)?;
    }
    if let InitialCondition::GibbsAtBeta { beta0 } = ens.initial {
        if !beta0.is_finite() || beta0 <= 0.0 {
            return Err(McError::InvalidEnsemble(format!(
                "initial beta0 must be positive, got {beta0}"
            )));
        }
    }

    let n_steps = ens.n_steps();
    let n_saved = ens.n_saved();
    let n_obs = observables.len();
    let row_len = n_obs * n_saved;
    let mut data = vec![0.0f64; ens.paths * row_len];

    let results: Vec<Result<(), McError>> = data
        .par_chunks_mut(row_len)
        .enumerate()
        .map(|(path, row)| simulate_path(spec, ens, observables, path, row, n_steps))
        .collect();
    for r in results {
        r?;
    }

    Ok(TrajectoryStore {
        chain: spec.clone(),
        ensemble: ens.clone(),
        observables: observables.to_vec(),
        data,
    })
}

fn simulate_path(
    spec: &ChainSpec,
    ens: &EnsembleSpec,
    observables: &[Observable],
    path: usize,
    row: &mut [f64],
    n_steps: usize,
) -> Result<(), McError> {
    let mut rng = path_rng(ens.seed, path);
    let mut state = initial_state(spec, ens, &mut rng)?;
    let n_saved = ens.n_saved();

    let record = |state: &ChainState, saved_idx: usize, row: &mut [f64]| {
        for (i, obs) in observables.iter().enumerate() {
            row[i * n_saved + saved_idx] = obs.eval(state);
        }
    };
    record(&state, 0, row);

    enum Stepper {
        Fpu(FpuStepper),
        Heat(HeatStepper),
    }
    let mut stepper = match spec.kind {
        ModelKind::FpuLangevin => Stepper::Fpu(FpuStepper::new(spec, ens.dt)?),
        ModelKind::HeatConduction => Stepper::Heat(HeatStepper::new(spec, ens.dt)?),
    };

    let mut saved = 1;
    for step in 1..=n_steps {
        match (&mut stepper, &mut state) {
            (Stepper::Fpu(s), ChainState::Fpu { r, p }) => s.step(r, p, &mut rng),
            (Stepper::Heat(s), ChainState::Heat { q, p, bath_l, bath_r }) => {
                s.step(q, p, bath_l, bath_r, &mut rng)
            }
            _ => unreachable!("state kind fixed by the chain spec"),
        }
        if step % ens.save_every == 0 {
            if !state.is_finite() {
                return Err(McError::BlowUp {
                    path,
                    step,
                    time: ens.dt * step as f64,
                    substep: "integrator state",
                });
            }
            record(&state, saved, row);
            saved += 1;
        }
    }
    debug_assert_eq!(saved, n_saved);
    Ok(())
}

fn initial_state(
    spec: &ChainSpec,
    ens: &EnsembleSpec,
    rng: &mut impl Rng,
) -> Result<ChainState, McError> {
    match (&ens.initial, spec.kind) {
        (InitialCondition::Gibbs, ModelKind::FpuLangevin) => {
            let (r, p) = sample_gibbs_initial(spec, rng)?;
            Ok(ChainState::Fpu { r, p })
        }
        (InitialCondition::GibbsAtBeta { beta0 }, ModelKind::FpuLangevin) => {
            let mut warm = spec.clone();
            warm.beta = *beta0;
            let (r, p) = sample_gibbs_initial(&warm, rng)?;
            Ok(ChainState::Fpu { r, p })
        }
        (InitialCondition::Point { state }, ModelKind::FpuLangevin) => {
            ChainState::from_flat_fpu(spec.n_sites, state).ok_or_else(|| {
                McError::InvalidEnsemble(format!(
                    "point state needs {} coordinates, got {}",
                    2 * spec.n_sites,
                    state.len()
                ))
            })
        }
        (InitialCondition::Point { state }, ModelKind::HeatConduction) => {
            ChainState::from_flat_heat(spec.n_sites, state).ok_or_else(|| {
                McError::InvalidEnsemble(format!(
                    "point state needs {} coordinates, got {}",
                    2 * spec.n_sites + 2,
                    state.len()
                ))
            })
        }
        (_, ModelKind::HeatConduction) => Err(McError::InvalidEnsemble(
            "heat-conduction ensembles support point initial conditions only".into(),
        )),
    }
}

/// On-disk layout of a [`TrajectoryStore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StoreFormat {
    Binary,
    Csv,
}

#[derive(Serialize, Deserialize)]
struct StoreManifest {
    format: StoreFormat,
    chain: ChainSpec,
    ensemble: EnsembleSpec,
    observables: Vec<Observable>,
}

impl TrajectoryStore {
    /// Writes `manifest.toml` plus `data.bin` (little-endian f64 rows) or
    /// `data.csv` into `dir`.
    pub fn save(&self, dir: &Path, format: StoreFormat) -> Result<(), McError> {
        std::fs::create_dir_all(dir)?;
        let manifest = StoreManifest {
            format,
            chain: self.chain.clone(),
            ensemble: self.ensemble.clone(),
            observables: self.observables.clone(),
        };
        let text = toml::to_string_pretty(&manifest)
            .map_err(|e| McError::Manifest(e.to_string()))?;
        std::fs::write(dir.join("manifest.toml"), text)?;
        match format {
            StoreFormat::Binary => {
                let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("data.bin"))?);
                for v in &self.data {
                    out.write_all(&v.to_le_bytes())?;
                }
            }
            StoreFormat::Csv => {
                let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("data.csv"))?);
                write!(out, "path,observable,time_index,value")?;
                writeln!(out)?;
                let nt = self.n_saved();
                for path in 0..self.paths() {
                    for (oi, obs) in self.observables.iter().enumerate() {
                        for (k, v) in self.series(path, oi).iter().enumerate() {
                            writeln!(out, "{path},{obs},{k},{v:.17e}")?;
                        }
                        debug_assert_eq!(self.series(path, oi).len(), nt);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<TrajectoryStore, McError> {
        let text = std::fs::read_to_string(dir.join("manifest.toml"))?;
        let manifest: StoreManifest =
            toml::from_str(&text).map_err(|e| McError::Manifest(e.to_string()))?;
        let paths = manifest.ensemble.paths;
        let n_saved = manifest.ensemble.n_saved();
        let len = paths * manifest.observables.len() * n_saved;
        let data = match manifest.format {
            StoreFormat::Binary => {
                let mut bytes = Vec::new();
                std::fs::File::open(dir.join("data.bin"))?.read_to_end(&mut bytes)?;
                if bytes.len() != len * 8 {
                    return Err(McError::Manifest(format!(
                        "data.bin has {} bytes, manifest implies {}",
                        bytes.len(),
                        len * 8
                    )));
                }
                bytes
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect()
            }
            StoreFormat::Csv => {
                let mut data = vec![0.0f64; len];
                let text = std::fs::read_to_string(dir.join("data.csv"))?;
                let n_obs = manifest.observables.len();
                for (lineno, line) in text.lines().enumerate() {
                    if lineno == 0 || line.is_empty() {
                        continue;
                    }
                    let mut parts = line.split(',');
                    let mut next = || {
                        parts
                            .next()
                            .ok_or_else(|| McError::Manifest(format!("short row {lineno}")))
                    };
                    let path: usize = next()?
                        .parse()
                        .map_err(|e| McError::Manifest(format!("row {lineno}: {e}")))?;
                    let obs: Observable = next()?
                        .parse()
                        .map_err(|e| McError::Manifest(format!("row {lineno}: {e}")))?;
                    let k: usize = next()?
                        .parse()
                        .map_err(|e| McError::Manifest(format!("row {lineno}: {e}")))?;
                    let v: f64 = next()?
                        .parse()
                        .map_err(|e| McError::Manifest(format!("row {lineno}: {e}")))?;
                    let oi = manifest
                        .observables
                        .iter()
                        .position(|o| *o == obs)
                        .ok_or_else(|| McError::Manifest(format!("row {lineno}: unknown {obs}")))?;
                    data[path * n_obs * n_saved + oi * n_saved + k] = v;
                }
                data
            }
        };
        Ok(TrajectoryStore {
            chain: manifest.chain,
            ensemble: manifest.ensemble,
            observables: manifest.observables,
            data,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_ensemble(paths: usize, seed: u64) -> (ChainSpec, EnsembleSpec, Vec<Observable>) {
        let spec = ChainSpec::fpu_uniform(4, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let ens = EnsembleSpec {
            paths,
            dt: 0.01,
            t_end: 0.1,
            seed,
            initial: InitialCondition::Gibbs,
            save_every: 2,
        };
        (spec, ens, vec![Observable::Momentum(1), Observable::Extension(0)])
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let (spec, ens, obs) = small_ensemble(8, 42);
        let a = simulate_ensemble(&spec, &ens, &obs).unwrap();
        let b = simulate_ensemble(&spec, &ens, &obs).unwrap();
        assert_eq!(a.data, b.data);
        let (_, ens2, _) = small_ensemble(8, 43);
        let c = simulate_ensemble(&spec, &ens2, &obs).unwrap();
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn single_path_run_works() {
        let (spec, mut ens, obs) = small_ensemble(1, 7);
        ens.save_every = 1;
        let store = simulate_ensemble(&spec, &ens, &obs).unwrap();
        assert_eq!(store.paths(), 1);
        assert_eq!(store.series(0, 0).len(), ens.n_saved());
    }

    #[test]
    fn store_round_trip_binary_and_csv() {
        let (spec, ens, obs) = small_ensemble(3, 9);
        let store = simulate_ensemble(&spec, &ens, &obs).unwrap();
        let dir = tempfile::tempdir().unwrap();
        for format in [StoreFormat::Binary, StoreFormat::Csv] {
            let sub = dir.path().join(format!("{format:?}"));
            store.save(&sub, format).unwrap();
            let back = TrajectoryStore::load(&sub).unwrap();
            assert_eq!(store.data, back.data);
            assert_eq!(store.observables, back.observables);
        }
    }

    #[test]
    fn incompatible_observable_is_rejected() {
        let (spec, ens, _) = small_ensemble(2, 1);
        let err = simulate_ensemble(&spec, &ens, &[Observable::Position(0)]).unwrap_err();
        assert!(matches!(err, McError::ObservableMismatch { .. }));
    }
}
