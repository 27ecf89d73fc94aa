//! `emz` - experiment runner for stochastic-chain reduced-order modeling:
//! simulate ensembles, estimate statistics, fit memory kernels from first
//! principles or data, solve the projected evolution equation, build
//! fluctuation models and run surrogate ensembles.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Config;
use crate::error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "emz",
    version,
    about = "Stochastic-chain simulation, memory-kernel fitting and reduced-order modeling"
)]
struct Cli {
    /// Run configuration (TOML with [model]/[ensemble]/[basis]/[fit]/[rom]).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override a config key, e.g. --set ensemble.paths=20000 (repeatable).
    #[arg(long = "set", global = true)]
    overrides: Vec<String>,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Artifact directory for commands that emit multiple files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Worker threads (default: EMZ_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo ensemble of the configured chain.
    Simulate,
    /// Stationary autocorrelation of a recorded observable.
    Acf {
        /// Trajectory store directory (as written by `simulate`/`rom-run`).
        #[arg(long)]
        store: PathBuf,
        /// Observable label, e.g. p[50] (default: first recorded).
        #[arg(long)]
        observable: Option<String>,
        /// Enable time-averaged refinement over this many lagged origins.
        #[arg(long)]
        origins: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ensemble mean of an observable with its relaxation fit.
    NeqMean {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        observable: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kernel density estimate of an observable's marginal.
    Kde {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        observable: Option<String>,
        /// Use only the trailing fraction of saved times (stationary part).
        #[arg(long, default_value_t = 1.0)]
        tail_fraction: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parametrize the memory kernel.
    FitKernel {
        /// `first-principle` (operator cumulants) or `data-driven` (LASSO).
        #[arg(long)]
        method: String,
        /// Sampled correlation function (CSV), for the data-driven method.
        #[arg(long)]
        acf: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the projected evolution equation for C(t).
    SolveGle {
        #[arg(long)]
        kernel: PathBuf,
        /// Initial value C(0) (default: equilibrium second moment).
        #[arg(long)]
        c0: Option<f64>,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        t_end: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the fluctuation-force mode model from a fitted kernel.
    KlBuild {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate a surrogate ensemble driven by the fluctuation model.
    RomRun {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        kl: PathBuf,
    },
    /// Normalized comparison of two sampled functions.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit an exponentially decaying envelope to a sampled function.
    DecayFit {
        #[arg(long)]
        input: PathBuf,
        /// Noise floor as a multiple of the tail standard deviation.
        #[arg(long, default_value_t = 10.0)]
        floor_factor: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize the manifests under the artifact directory.
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("emz: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn init_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("EMZ_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn load_config(cli: &Cli) -> Result<(Config, String)> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs --config <file>".into()))?;
    Config::load(path, &cli.overrides)
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate => {
            let (config, resolved) = load_config(cli)?;
            std::fs::create_dir_all(&cli.out_dir)?;
            commands::simulate(&config, &resolved, cli.seed, &cli.out_dir)
        }
        Command::Acf {
            store,
            observable,
            origins,
            out,
        } => commands::acf(store, observable.as_deref(), *origins, out),
        Command::NeqMean {
            store,
            observable,
            out,
        } => commands::neq_mean(store, observable.as_deref(), out),
        Command::Kde {
            store,
            observable,
            tail_fraction,
            out,
        } => commands::kde(store, observable.as_deref(), *tail_fraction, out),
        Command::FitKernel { method, acf, out } => {
            let (config, resolved) = load_config(cli)?;
            commands::fit_kernel(&config, &resolved, method, acf.as_deref(), out)
        }
        Command::SolveGle {
            kernel,
            c0,
            dt,
            t_end,
            out,
        } => {
            let (config, resolved) = load_config(cli)?;
            commands::solve_gle(&config, &resolved, kernel, *c0, *dt, *t_end, out)
        }
        Command::KlBuild { kernel, out } => {
            let (config, resolved) = load_config(cli)?;
            commands::kl_build(&config, &resolved, kernel, out)
        }
        Command::RomRun { kernel, kl } => {
            let (config, resolved) = load_config(cli)?;
            std::fs::create_dir_all(&cli.out_dir)?;
            commands::rom_run(&config, &resolved, cli.seed, kernel, kl, &cli.out_dir)
        }
        Command::Compare { a, b, out } => commands::compare(a, b, out),
        Command::DecayFit {
            input,
            floor_factor,
            out,
        } => commands::decay_fit(input, *floor_factor, out),
        Command::Report => commands::report(&cli.out_dir),
    }
}
