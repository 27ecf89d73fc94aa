use std::io::Write as _;
use std::path::{Path, PathBuf};

use dd_kernel::fit_kernel_dd;
use fp_kernel::{gamma_coefficients, kernel_from_mu, mu_from_gamma, BasisSpec, KernelModel};
use gle_rom::{kl_decompose, run_rom, solve_projected_gle, InitialValueSampler, KLModel, TimeGrid};
use mc_sim::{
    autocorrelation, autocorrelation_time_averaged, fit_exponential_bound, kde_marginal,
    nonequilibrium_mean, simulate_ensemble, AcfEstimate, EnsembleSpec, InitialCondition,
    Observable, SampledFunction, TrajectoryStore,
};
use poly_algebra::{ChainSpec, GibbsMeasure, SparsePoly, Var};

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(())
}

fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "artifact".into());
    name.push_str(".manifest.toml");
    artifact.with_file_name(name)
}

fn write_csv(
    path: &Path,
    f: &SampledFunction,
    manifest: &RunManifest,
    extra_comment: Option<String>,
) -> Result<()> {
    ensure_parent(path)?;
    let mut comments = manifest.csv_comments();
    if let Some(c) = extra_comment {
        comments.push(c);
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_csv(&mut out, &comments)?;
    Ok(())
}

fn read_sampled(path: &Path) -> Result<SampledFunction> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Run(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = std::io::BufReader::new(file);
    Ok(SampledFunction::read_csv(&mut reader)?)
}

/// Polynomial observable for the symbolic route.
fn u0_polynomial(obs: &Observable) -> Result<SparsePoly> {
    match obs {
        Observable::Momentum(j) => Ok(SparsePoly::variable(Var::p(*j))),
        Observable::Extension(j) => Ok(SparsePoly::variable(Var::r(*j))),
        other => Err(CliError::Config(format!(
            "first-principle route needs a momentum or extension observable, got {other}"
        ))),
    }
}

/// Stationary second moment of the observable under the product measure.
fn observable_variance(spec: &ChainSpec, obs: &Observable) -> Result<f64> {
    let measure = GibbsMeasure::new(spec)?;
    let u0 = u0_polynomial(obs)?;
    Ok(measure.norm_sq(&u0)?)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

pub fn simulate(config: &Config, resolved: &str, seed: Option<u64>, out_dir: &Path) -> Result<()> {
    let manifest = RunManifest::new("simulate", resolved, seed);
    let spec = config.chain_spec()?;
    let ens = config.ensemble_spec(seed)?;
    let obs = config.observable()?;
    let store = simulate_ensemble(&spec, &ens, &[obs])?;
    let store_dir = out_dir.join("store");
    store.save(&store_dir, config.store_format()?)?;
    manifest.write(
        &out_dir.join("simulate.manifest.toml"),
        &[
            ("paths".into(), store.paths().to_string()),
            ("saved-times".into(), store.n_saved().to_string()),
        ],
    )?;
    println!(
        "simulate: {} paths x {} saved times -> {} [manifest {}]",
        store.paths(),
        store.n_saved(),
        store_dir.display(),
        manifest.hash()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// acf / neq-mean / kde
// ---------------------------------------------------------------------------

fn load_store(dir: &Path) -> Result<TrajectoryStore> {
    Ok(TrajectoryStore::load(dir)?)
}

/// Store provenance text used as the hash input of derived statistics, so
/// identical data yields identical artifacts wherever the store lives.
fn store_provenance(dir: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(dir.join("manifest.toml"))?)
}

fn pick_observable(store: &TrajectoryStore, requested: Option<&str>) -> Result<Observable> {
    match requested {
        Some(s) => s
            .parse()
            .map_err(|e: String| CliError::Config(format!("observable: {e}"))),
        None => store
            .observables
            .first()
            .copied()
            .ok_or_else(|| CliError::Run("store records no observables".into())),
    }
}

pub fn acf(
    store_dir: &Path,
    observable: Option<&str>,
    origins: Option<usize>,
    out: &Path,
) -> Result<()> {
    let store = load_store(store_dir)?;
    let obs = pick_observable(&store, observable)?;
    let est: AcfEstimate = match origins {
        Some(n) => autocorrelation_time_averaged(&store, &obs, n)?,
        None => autocorrelation(&store, &obs)?,
    };
    let manifest = RunManifest::new("acf", &store_provenance(store_dir)?, None);
    let estimator_note = format!("estimator {:?}", est.estimator);
    write_csv(out, &est.acf, &manifest, Some(estimator_note.clone()))?;
    let stderr_fn = SampledFunction::new(est.acf.t0(), est.acf.dt(), est.stderr.clone())?;
    let stderr_path = out.with_extension("stderr.csv");
    write_csv(&stderr_path, &stderr_fn, &manifest, Some(estimator_note))?;
    manifest.write(
        &manifest_path(out),
        &[
            ("observable".into(), format!("\"{obs}\"")),
            ("c0".into(), format!("{:.17e}", est.acf.first())),
        ],
    )?;
    println!(
        "acf: {} lags, C(0) = {:.6} -> {} [manifest {}]",
        est.acf.len(),
        est.acf.first(),
        out.display(),
        manifest.hash()
    );
    Ok(())
}

pub fn neq_mean(store_dir: &Path, observable: Option<&str>, out: &Path) -> Result<()> {
    let store = load_store(store_dir)?;
    let obs = pick_observable(&store, observable)?;
    let est = nonequilibrium_mean(&store, &obs)?;
    let manifest = RunManifest::new("neq-mean", &store_provenance(store_dir)?, None);
    write_csv(out, &est.mean, &manifest, None)?;
    let mut extra = vec![("tail-value".into(), format!("{:.17e}", est.tail_value))];
    match &est.decay {
        Some(fit) => {
            extra.push(("decay-rate".into(), format!("{:.17e}", fit.rate)));
            extra.push(("decay-amplitude".into(), format!("{:.17e}", fit.amplitude)));
            println!(
                "neq-mean: tail {:.6}, decay toward it at rate {:.4} -> {}",
                est.tail_value,
                fit.rate,
                out.display()
            );
        }
        None => println!(
            "neq-mean: tail {:.6}, no decaying envelope fitted -> {}",
            est.tail_value,
            out.display()
        ),
    }
    manifest.write(&manifest_path(out), &extra)?;
    Ok(())
}

pub fn kde(
    store_dir: &Path,
    observable: Option<&str>,
    tail_fraction: f64,
    out: &Path,
) -> Result<()> {
    if !(0.0 < tail_fraction && tail_fraction <= 1.0) {
        return Err(CliError::Config(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let store = load_store(store_dir)?;
    let obs = pick_observable(&store, observable)?;
    let oi = store
        .observable_index(&obs)
        .ok_or_else(|| CliError::Run(format!("store does not record {obs}")))?;
    let nt = store.n_saved();
    let start = ((1.0 - tail_fraction) * nt as f64).floor() as usize;
    let samples: Vec<f64> = (0..store.paths())
        .flat_map(|p| store.series(p, oi)[start.min(nt - 1)..].iter().copied())
        .collect();
    let density = kde_marginal(&samples)?;
    let manifest = RunManifest::new("kde", &store_provenance(store_dir)?, None);
    ensure_parent(out)?;
    let mut file = std::io::BufWriter::new(std::fs::File::create(out)?);
    for line in manifest.csv_comments() {
        writeln!(file, "# {line}")?;
    }
    writeln!(file, "x,density")?;
    for (x, d) in density.iter_points() {
        writeln!(file, "{x:.12e},{d:.17e}")?;
    }
    manifest.write(
        &manifest_path(out),
        &[("samples".into(), samples.len().to_string())],
    )?;
    println!(
        "kde: {} samples over {} grid points -> {}",
        samples.len(),
        density.len(),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// fit-kernel
// ---------------------------------------------------------------------------

pub fn fit_kernel(
    config: &Config,
    resolved: &str,
    method: &str,
    acf_path: Option<&Path>,
    out: &Path,
) -> Result<()> {
    match method {
        "first-principle" => fit_kernel_first_principle(config, resolved, out),
        "data-driven" => {
            let acf = acf_path.ok_or_else(|| {
                CliError::Config("data-driven fit needs --acf <csv of C(t)>".into())
            })?;
            fit_kernel_data_driven(config, resolved, acf, out)
        }
        other => Err(CliError::Config(format!(
            "unknown fit method `{other}` (expected `first-principle` or `data-driven`)"
        ))),
    }
}

fn basis_section(config: &Config) -> Result<&crate::config::BasisSection> {
    config
        .basis
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [basis] section".into()))
}

fn fit_kernel_first_principle(config: &Config, resolved: &str, out: &Path) -> Result<()> {
    let manifest = RunManifest::new("fit-kernel first-principle", resolved, None);
    let spec = config.chain_spec()?;
    let obs = config.observable()?;
    let u0 = u0_polynomial(&obs)?;
    let basis_cfg = basis_section(config)?;
    let order = basis_cfg.order;
    let n_max = order + 2;
    let gamma = gamma_coefficients(&u0, n_max, &spec)?;
    let mu = mu_from_gamma(&gamma);
    let omega = gamma[0];

    let basis = match basis_cfg.kind.as_str() {
        "taylor" => BasisSpec::Taylor,
        "faber" => {
            // Domain defaults follow the dominant cumulant scales.
            let a = basis_cfg.a.unwrap_or(-gamma[0]);
            let b = basis_cfg
                .b
                .unwrap_or_else(|| 2.0 * (gamma[0] * gamma[0] - gamma[1]).max(0.0).sqrt());
            BasisSpec::Faber { a, b }
        }
        "laguerre" => {
            return Err(CliError::Config(
                "the first-principle mapping supports taylor and faber bases".into(),
            ))
        }
        other => return Err(CliError::Config(format!("unknown basis kind `{other}`"))),
    };
    let mut model = kernel_from_mu(&mu, &basis, order)?;
    model.observable = obs.to_string();
    ensure_parent(out)?;
    model.save(out)?;

    let gamma_list = numbers_list(&gamma);
    let mu_list = numbers_list(&mu);
    let mut extra = vec![
        ("omega-streaming".into(), format!("{omega:.17e}")),
        ("gamma".into(), gamma_list),
        ("mu".into(), mu_list),
        ("basis".into(), format!("\"{}\"", basis.kind_name())),
        ("order".into(), order.to_string()),
    ];
    if let Some(fit) = &config.fit {
        if let Some(explicit) = omega_override(fit)? {
            if (explicit - omega).abs() > 1e-12 * omega.abs().max(1.0) {
                extra.push(("omega-override".into(), format!("{explicit:.17e}")));
                extra.push((
                    "omega-discrepancy".into(),
                    "\"streaming definition disagrees with configured value\"".into(),
                ));
                println!(
                    "NOTE: streaming coefficient from the generator is {omega:.6}, \
                     config requests {explicit:.6}; both recorded"
                );
            }
        }
    }
    manifest.write(&manifest_path(out), &extra)?;
    println!(
        "fit-kernel (first-principle): Omega = {omega:.6}, order {order} {} basis -> {} [manifest {}]",
        basis.kind_name(),
        out.display(),
        manifest.hash()
    );
    Ok(())
}

fn numbers_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{x:.17e}")).collect();
    format!("[{}]", items.join(", "))
}

fn omega_override(fit: &crate::config::FitSection) -> Result<Option<f64>> {
    match &fit.omega {
        None => Ok(None),
        Some(toml::Value::String(s)) if s == "streaming" => Ok(None),
        Some(toml::Value::Float(x)) => Ok(Some(*x)),
        Some(toml::Value::Integer(x)) => Ok(Some(*x as f64)),
        Some(other) => Err(CliError::Config(format!(
            "fit.omega must be a number or \"streaming\", got {other}"
        ))),
    }
}

fn fit_kernel_data_driven(
    config: &Config,
    resolved: &str,
    acf_path: &Path,
    out: &Path,
) -> Result<()> {
    let manifest = RunManifest::new("fit-kernel data-driven", resolved, None);
    let spec = config.chain_spec()?;
    let obs = config.observable()?;
    let c = read_sampled(acf_path)?;

    // Streaming coefficient: explicit config value wins, with the
    // symbolically evaluated one always computed and reported beside it.
    let streaming = {
        let u0 = u0_polynomial(&obs)?;
        gamma_coefficients(&u0, 1, &spec)?[0]
    };
    let fit_cfg = config.fit.clone().unwrap_or(crate::config::FitSection {
        method: None,
        lambda_grid: None,
        omega: None,
    });
    let omega = omega_override(&fit_cfg)?.unwrap_or(streaming);
    let discrepancy = (omega - streaming).abs() > 1e-12 * streaming.abs().max(1.0);
    if discrepancy {
        println!(
            "NOTE: regression uses omega = {omega:.6} while the streaming definition \
             gives {streaming:.6}; discrepancy recorded"
        );
    }

    // Decay-rate-matched dictionary scales.
    let alpha_hat = fit_exponential_bound(&c, 10.0).map(|f| f.rate).ok();
    let basis_cfg = basis_section(config)?;
    let basis = match basis_cfg.kind.as_str() {
        "laguerre" => {
            let sigma = match (basis_cfg.sigma, alpha_hat) {
                (Some(s), _) => s,
                (None, Some(a)) => 2.0 * a,
                (None, None) => {
                    return Err(CliError::Config(
                        "no decaying envelope in the data; set basis.sigma explicitly".into(),
                    ))
                }
            };
            BasisSpec::Laguerre { sigma }
        }
        "faber" => {
            let fallback = || {
                alpha_hat.ok_or_else(|| {
                    CliError::Config(
                        "no decaying envelope in the data; set basis.a and basis.b explicitly"
                            .into(),
                    )
                })
            };
            let a = match basis_cfg.a {
                Some(a) => a,
                None => fallback()?,
            };
            let b = match basis_cfg.b {
                Some(b) => b,
                None => 2.0 * fallback()?,
            };
            BasisSpec::Faber { a, b }
        }
        "taylor" => {
            return Err(CliError::Config(
                "the data-driven dictionary supports laguerre and faber bases".into(),
            ))
        }
        other => return Err(CliError::Config(format!("unknown basis kind `{other}`"))),
    };

    let lambda_grid = match fit_cfg.lambda_grid.clone() {
        Some(grid) => grid,
        None => {
            // Scale-aware default: anchored at the smallest penalty that
            // zeroes every coefficient.
            let reg = dd_kernel::assemble_regression(&c, omega, &basis, basis_cfg.order, None)?;
            let lmax = dd_kernel::lambda_max(&reg.columns, &reg.target).max(1e-12);
            [1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1]
                .iter()
                .map(|f| f * lmax)
                .collect()
        }
    };
    let (mut model, report) = fit_kernel_dd(
        &c,
        omega,
        &basis,
        basis_cfg.order,
        &lambda_grid,
        &obs.to_string(),
    )?;
    model.observable = obs.to_string();
    ensure_parent(out)?;
    model.save(out)?;

    let chosen = report.chosen_entry();
    let mut extra = vec![
        ("omega-used".into(), format!("{omega:.17e}")),
        ("omega-streaming".into(), format!("{streaming:.17e}")),
        (
            "omega-discrepancy".into(),
            format!("{discrepancy}"),
        ),
        ("basis".into(), format!("\"{}\"", basis.kind_name())),
        ("chosen-lambda".into(), format!("{:.6e}", chosen.lambda)),
        (
            "chosen-replay-error".into(),
            format!("{:.17e}", chosen.replay_error),
        ),
        (
            "chosen-kkt-residual".into(),
            format!("{:.6e}", chosen.kkt_residual),
        ),
    ];
    for (i, entry) in report.entries.iter().enumerate() {
        extra.push((
            format!("lambda-{i}"),
            format!(
                "\"lambda {:.6e}: replay {:.6e}, rms residual {:.6e}, kkt {:.3e}, nonzeros {}{}\"",
                entry.lambda,
                entry.replay_error,
                entry.residual_rms,
                entry.kkt_residual,
                entry.nonzeros,
                if entry.converged { "" } else { ", not converged" }
            ),
        ));
    }
    manifest.write(&manifest_path(out), &extra)?;
    println!(
        "fit-kernel (data-driven): lambda = {:.3e}, replay error {:.3e} -> {} [manifest {}]",
        chosen.lambda,
        chosen.replay_error,
        out.display(),
        manifest.hash()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// solve-gle / kl-build / rom-run
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
pub fn solve_gle(
    config: &Config,
    resolved: &str,
    kernel_path: &Path,
    c0_flag: Option<f64>,
    dt: f64,
    t_end: f64,
    out: &Path,
) -> Result<()> {
    let manifest = RunManifest::new("solve-gle", resolved, None);
    let model = KernelModel::load(kernel_path)?;
    let c0 = match c0_flag {
        Some(v) => v,
        None => observable_variance(&config.chain_spec()?, &config.observable()?)?,
    };
    let n_steps = (t_end / dt).round() as usize;
    let grid = TimeGrid::new(dt, n_steps.max(1))?;
    let solution = solve_projected_gle(&model, c0, &grid)?;
    // Stability diagnostic: a dissipative solution should stay below its
    // initial magnitude; violations are flagged, not fatal.
    let bounded = solution.values().iter().all(|v| v.abs() <= c0.abs() * (1.0 + 1e-12));
    if !bounded {
        println!("NOTE: |C(t)| exceeds |C(0)| somewhere on the horizon (flagged in manifest)");
    }
    write_csv(out, &solution, &manifest, Some(format!("c0 {c0:.17e}")))?;
    manifest.write(
        &manifest_path(out),
        &[
            ("c0".into(), format!("{c0:.17e}")),
            ("bounded-by-initial".into(), bounded.to_string()),
        ],
    )?;
    println!(
        "solve-gle: C(0) = {c0:.6}, {} steps -> {} [manifest {}]",
        n_steps,
        out.display(),
        manifest.hash()
    );
    Ok(())
}

pub fn kl_build(config: &Config, resolved: &str, kernel_path: &Path, out: &Path) -> Result<()> {
    let manifest = RunManifest::new("kl-build", resolved, None);
    let model = KernelModel::load(kernel_path)?;
    let rom = config
        .rom
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [rom] section".into()))?;
    let spec = config.chain_spec()?;
    let obs = config.observable()?;
    let c0 = observable_variance(&spec, &obs)?;
    let n = (rom.t_end / rom.dt).round() as usize + 1;

    // Covariance of the fluctuation force. The classical
    // fluctuation-dissipation pairing is R(tau) = -C(0) K(|tau|); the
    // unsigned identification R = +K is also checked and its verdict
    // recorded, since a dissipative kernel (K(0) < 0) can never pass it.
    let kernel_values: Vec<f64> = (0..n).map(|i| model.evaluate(rom.dt * i as f64)).collect();
    let literal = SampledFunction::new(0.0, rom.dt, kernel_values.clone())?;
    let literal_verdict = match kl_decompose(&literal, 0) {
        Ok(_) => "psd".to_string(),
        Err(e) => format!("rejected ({e})"),
    };
    let fdt_values: Vec<f64> = kernel_values.iter().map(|k| -c0 * k).collect();
    let covariance = SampledFunction::new(0.0, rom.dt, fdt_values)?;
    let kl = kl_decompose(&covariance, rom.modes)?;
    kl.save(out)?;

    let captured: f64 = kl.eigenvalues().iter().sum();
    manifest.write(
        &manifest_path(out),
        &[
            ("modes".into(), rom.modes.to_string()),
            ("c0".into(), format!("{c0:.17e}")),
            (
                "covariance".into(),
                "\"classical-fdt: R(tau) = -C(0) K(|tau|)\"".into(),
            ),
            (
                "unsigned-covariance-check".into(),
                format!("\"{literal_verdict}\""),
            ),
            ("captured-mass".into(), format!("{captured:.17e}")),
            (
                "leading-eigenvalue".into(),
                format!("{:.17e}", kl.eigenvalues().first().copied().unwrap_or(0.0)),
            ),
        ],
    )?;
    println!(
        "kl-build: {} modes on [0, {}], unsigned-covariance check: {} -> {} [manifest {}]",
        rom.modes,
        rom.t_end,
        literal_verdict,
        out.display(),
        manifest.hash()
    );
    Ok(())
}

pub fn rom_run(
    config: &Config,
    resolved: &str,
    seed: Option<u64>,
    kernel_path: &Path,
    kl_path: &Path,
    out_dir: &Path,
) -> Result<()> {
    let manifest = RunManifest::new("rom-run", resolved, seed);
    let model = KernelModel::load(kernel_path)?;
    let kl = KLModel::load(kl_path)?;
    let rom = config
        .rom
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [rom] section".into()))?;
    let spec = config.chain_spec()?;
    let obs = config.observable()?;
    let variance = observable_variance(&spec, &obs)?;
    let ens = EnsembleSpec {
        paths: rom.paths,
        dt: rom.dt,
        t_end: rom.t_end,
        seed: seed.unwrap_or(rom.seed),
        initial: InitialCondition::Gibbs,
        save_every: rom.save_every,
    };
    let store = run_rom(
        &model,
        &kl,
        InitialValueSampler::StationaryGaussian { variance },
        &spec,
        obs,
        &ens,
    )?;
    let store_dir = out_dir.join("rom-store");
    store.save(&store_dir, config.store_format().unwrap_or(mc_sim::StoreFormat::Binary))?;
    manifest.write(
        &out_dir.join("rom-run.manifest.toml"),
        &[
            ("paths".into(), rom.paths.to_string()),
            ("u0-variance".into(), format!("{variance:.17e}")),
            ("kernel-omega".into(), format!("{:.17e}", model.omega)),
        ],
    )?;
    println!(
        "rom-run: {} paths, u0 variance {:.6} -> {} [manifest {}]",
        rom.paths,
        variance,
        store_dir.display(),
        manifest.hash()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// compare / decay-fit / report
// ---------------------------------------------------------------------------

pub fn compare(a_path: &Path, b_path: &Path, out: &Path) -> Result<()> {
    let a = read_sampled(a_path)?;
    let b = read_sampled(b_path)?;
    // Allow one grid to be an integer refinement of the other: compare on
    // the coarser one.
    let ratio = b.dt() / a.dt();
    let (stride_a, stride_b) = if ratio >= 1.0 {
        if (ratio - ratio.round()).abs() > 1e-6 {
            return Err(CliError::Run(format!(
                "grids incompatible: dt {} vs {}",
                a.dt(),
                b.dt()
            )));
        }
        (ratio.round() as usize, 1usize)
    } else {
        let inv = 1.0 / ratio;
        if (inv - inv.round()).abs() > 1e-6 {
            return Err(CliError::Run(format!(
                "grids incompatible: dt {} vs {}",
                a.dt(),
                b.dt()
            )));
        }
        (1usize, inv.round() as usize)
    };
    let n = ((a.len() - 1) / stride_a).min((b.len() - 1) / stride_b) + 1;
    let (a0, b0) = (a.first(), b.first());
    if a0 == 0.0 || b0 == 0.0 {
        return Err(CliError::Run("cannot normalize: value at t = 0 is zero".into()));
    }
    let coarse_dt = a.dt() * stride_a as f64;
    let mut sup = 0.0f64;
    let mut sup_t = 0.0f64;
    let mut l2 = 0.0f64;
    for i in 0..n {
        let d = (a.values()[i * stride_a] / a0 - b.values()[i * stride_b] / b0).abs();
        if d > sup {
            sup = d;
            sup_t = coarse_dt * i as f64;
        }
        l2 += d * d;
    }
    let l2 = (l2 * coarse_dt).sqrt();
    ensure_parent(out)?;
    let report = format!(
        "a = \"{}\"\nb = \"{}\"\ncompared-points = {n}\nnormalized-sup-distance = {sup:.17e}\n\
         sup-location-t = {sup_t:.12e}\nnormalized-l2-distance = {l2:.17e}\n\
         a0 = {a0:.17e}\nb0 = {b0:.17e}\n",
        a_path.display(),
        b_path.display()
    );
    std::fs::write(out, report)?;
    println!(
        "compare: sup |a/a0 - b/b0| = {sup:.6e} at t = {sup_t:.4} over {n} points -> {}",
        out.display()
    );
    Ok(())
}

pub fn decay_fit(input: &Path, floor_factor: f64, out: &Path) -> Result<()> {
    let f = read_sampled(input)?;
    ensure_parent(out)?;
    match fit_exponential_bound(&f, floor_factor) {
        Ok(fit) => {
            let report = format!(
                "input = \"{}\"\nverdict = \"decay\"\namplitude = {:.17e}\nrate = {:.17e}\n\
                 points-used = {}\nnoise-floor = {:.6e}\n",
                input.display(),
                fit.amplitude,
                fit.rate,
                fit.points_used,
                fit.noise_floor
            );
            std::fs::write(out, report)?;
            println!(
                "decay-fit: |f(t)| <= {:.6} exp(-{:.6} t) ({} points) -> {}",
                fit.amplitude,
                fit.rate,
                fit.points_used,
                out.display()
            );
            Ok(())
        }
        Err(mc_sim::McError::NoDecayObserved(detail)) => {
            let report = format!(
                "input = \"{}\"\nverdict = \"no-exponential-decay\"\ndetail = \"{detail}\"\n",
                input.display()
            );
            std::fs::write(out, report)?;
            println!("decay-fit: no exponential decay observed ({detail})");
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

pub fn report(out_dir: &Path) -> Result<()> {
    let mut entries: Vec<(String, String)> = Vec::new();
    let mut stack = vec![out_dir.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let Ok(read) = std::fs::read_dir(&dir) else {
            continue;
        };
        for entry in read.flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if path
                .file_name()
                .map(|n| n.to_string_lossy().ends_with(".manifest.toml"))
                .unwrap_or(false)
            {
                let text = std::fs::read_to_string(&path)?;
                entries.push((path.display().to_string(), text));
            }
        }
    }
    entries.sort();
    if entries.is_empty() {
        println!("report: no manifests under {}", out_dir.display());
        return Ok(());
    }
    let summary_path = out_dir.join("report.txt");
    let mut out = String::new();
    for (path, text) in &entries {
        out.push_str(&format!("== {path}\n"));
        for line in text.lines() {
            if line.starts_with("hash")
                || line.starts_with("command")
                || line.starts_with("seed")
                || line.starts_with("wall-time")
                || line.starts_with("omega")
                || line.starts_with("chosen")
                || line.starts_with("verdict")
            {
                out.push_str(&format!("   {line}\n"));
            }
        }
    }
    std::fs::write(&summary_path, &out)?;
    print!("{out}");
    println!("report: {} manifests -> {}", entries.len(), summary_path.display());
    Ok(())
}
