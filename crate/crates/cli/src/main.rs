//! Command-line runner for fermionic-probe thermometry sweeps.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure.

mod commands;
mod config;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{
    read_config_file, resolve, resolve_opt, ConfigError, EnergyList, Format, GridSpec, RunConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "fermitherm",
    version,
    about = "Thermometry of fermionic probes strongly coupled to a wide-band fermionic bath",
    long_about = "Simulates single- and two-fermion probes exchanging particles with a thermal \
Fermi bath, and sweeps the Fisher information of temperature estimation over time, coupling \
and temperature grids. Sweep outputs are deterministic data files plus a metadata sidecar."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// Probe mode energy (single-probe commands)
    #[arg(long)]
    epsilon: Option<f64>,
    /// Two probe energies, comma separated (multi-probe commands)
    #[arg(long)]
    epsilons: Option<EnergyList>,
    /// Bath chemical potential
    #[arg(long)]
    mu: Option<f64>,
    /// Wide-band coupling rate
    #[arg(long)]
    gamma: Option<f64>,
    /// Bath temperature
    #[arg(long)]
    temperature: Option<f64>,
    /// Initial occupation of every probe mode
    #[arg(long)]
    p0: Option<f64>,
    /// Time grid min:max:points[:lin|log]
    #[arg(long = "t-grid")]
    t_grid: Option<GridSpec>,
    /// Coupling grid min:max:points[:lin|log]
    #[arg(long = "gamma-grid")]
    gamma_grid: Option<GridSpec>,
    /// Temperature grid min:max:points[:lin|log]
    #[arg(long = "T-grid")]
    temperature_grid: Option<GridSpec>,
    /// Output data file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Relative quadrature tolerance
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
    /// Absolute quadrature tolerance
    #[arg(long = "abs-tol")]
    abs_tol: Option<f64>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    jobs: Option<usize>,
    /// Optional key=value config file (flags take precedence)
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Steady-state populations and noise-to-signal ratios over T x Gamma
    EquilibriumSweep(CommonArgs),
    /// Exact and Markovian Fisher information over a time grid
    TransientFi(CommonArgs),
    /// Fisher-information rate over a time grid, optima in metadata
    FiRate(CommonArgs),
    /// Optimal interrogation time over a Gamma x T contour grid
    TstarContour(CommonArgs),
    /// Steady-state FI and maximum FI rate as functions of the coupling
    GammaOpt(CommonArgs),
    /// Common-bath vs independent-bath QFI for two probes
    MultiAdditivity {
        #[command(flatten)]
        common: CommonArgs,
        /// Compare steady states over --gamma-grid instead of a time sweep
        #[arg(long)]
        steady: bool,
    },
    /// Run the built-in verification battery (exit 0 iff all checks pass)
    Verify(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::EquilibriumSweep(_) => "equilibrium-sweep",
            Command::TransientFi(_) => "transient-fi",
            Command::FiRate(_) => "fi-rate",
            Command::TstarContour(_) => "tstar-contour",
            Command::GammaOpt(_) => "gamma-opt",
            Command::MultiAdditivity { .. } => "multi-additivity",
            Command::Verify(_) => "verify",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::EquilibriumSweep(c)
            | Command::TransientFi(c)
            | Command::FiRate(c)
            | Command::TstarContour(c)
            | Command::GammaOpt(c)
            | Command::Verify(c) => c,
            Command::MultiAdditivity { common, .. } => common,
        }
    }

    fn steady(&self) -> bool {
        matches!(self, Command::MultiAdditivity { steady: true, .. })
    }
}

fn resolve_config(cmd: &Command) -> Result<RunConfig, ConfigError> {
    let args = cmd.common();
    let file: BTreeMap<String, String> = match &args.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let epsilons = match (&args.epsilons, file.get("epsilons")) {
        (Some(e), _) => Some(e.0.clone()),
        (None, Some(raw)) => Some(raw.parse::<EnergyList>()?.0),
        (None, None) => None,
    };
    let jobs_default = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let cfg = RunConfig {
        command: cmd.name().to_string(),
        epsilon: resolve(args.epsilon, &file, "epsilon", 1.0)?,
        epsilons,
        mu: resolve(args.mu, &file, "mu", 0.0)?,
        gamma: resolve(args.gamma, &file, "gamma", 0.5)?,
        temperature: resolve(args.temperature, &file, "temperature", 1.0)?,
        p0: resolve(args.p0, &file, "p0", 0.0)?,
        t_grid: resolve_opt(args.t_grid.clone(), &file, "t-grid")?,
        gamma_grid: resolve_opt(args.gamma_grid.clone(), &file, "gamma-grid")?,
        temperature_grid: resolve_opt(args.temperature_grid.clone(), &file, "T-grid")?,
        steady: cmd.steady(),
        out: args
            .out
            .clone()
            .or_else(|| file.get("out").map(PathBuf::from)),
        format: match (&args.format, file.get("format")) {
            (Some(f), _) => *f,
            (None, Some(raw)) => match raw.as_str() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                other => return Err(ConfigError(format!("unknown format '{other}'"))),
            },
            (None, None) => Format::Csv,
        },
        rel_tol: resolve(args.rel_tol, &file, "rel-tol", 1e-9)?,
        abs_tol: resolve(args.abs_tol, &file, "abs-tol", 1e-12)?,
        jobs: resolve(args.jobs, &file, "jobs", jobs_default)?,
    };
    if cfg.rel_tol <= 0.0 || cfg.abs_tol <= 0.0 {
        return Err(ConfigError("tolerances must be positive".into()));
    }
    if cfg.jobs == 0 {
        return Err(ConfigError("--jobs must be at least 1".into()));
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successes; everything else is a config error
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match resolve_config(&cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(1);
        }
    };
    match commands::execute(&config) {
        Ok(outcome) => {
            if outcome.failed_rows > 0 {
                eprintln!(
                    "{} row(s) failed numerically; partial results written",
                    outcome.failed_rows
                );
                ExitCode::from(2)
            } else if outcome.checks_failed > 0 {
                eprintln!("{} verification check(s) failed", outcome.checks_failed);
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(1)
        }
    }
}
