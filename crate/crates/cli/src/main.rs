//! `cvmetro`: tabulate metrology curves as CSV with a JSON sidecar.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical failure.

mod commands;
mod figures;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::params::Params;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl From<cvmetro::Error> for CliError {
    fn from(e: cvmetro::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "cvmetro", version, about = "Gaussian-state metrology curves as CSV")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output file stem (defaults to the subcommand name).
    #[arg(long, global = true)]
    name: Option<String>,
    /// key = value parameter file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; output bytes are fixed for a fixed thread count.
    #[arg(long, global = true, env = "CVMETRO_THREADS", default_value_t = 1)]
    threads: usize,
    /// Master seed, required by the Monte Carlo subcommands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Monte Carlo interference fringes.
    Fringes(commands::FringesArgs),
    /// Squeezed over coherent sensitivity ratio against phase.
    Ratio(commands::RatioArgs),
    /// Optimal probe quantum Fisher information against total energy.
    QfiBounds(commands::QfiArgs),
    /// Optimized interferometer configurations.
    ConfigOpt(commands::ConfigArgs),
    /// Quantum and classical illumination error probabilities.
    Illumination(commands::IllumArgs),
    /// Holometer covariance uncertainty ratios.
    HolometerRatio(commands::HoloArgs),
    /// Noise reduction factors of the coupled interferometers.
    Nrf(commands::NrfArgs),
    /// Print the figure to subcommand mapping.
    ListFigures,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let sub = match &cli.cmd {
        Cmd::Fringes(_) => "fringes",
        Cmd::Ratio(_) => "ratio",
        Cmd::QfiBounds(_) => "qfi-bounds",
        Cmd::ConfigOpt(_) => "config-opt",
        Cmd::Illumination(_) => "illumination",
        Cmd::HolometerRatio(_) => "holometer-ratio",
        Cmd::Nrf(_) => "nrf",
        Cmd::ListFigures => {
            print!("{}", figures::render());
            return Ok(());
        }
    };
    if cli.threads == 0 {
        return Err(CliError::Validation("threads must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let file = match &cli.config {
        Some(path) => params::read_config(path)?,
        None => Default::default(),
    };
    let mut p = Params::new(file);
    let seed = p.optional("seed", cli.seed)?;
    let need_seed = || seed.ok_or_else(|| CliError::Validation(format!("{sub} needs --seed")));
    let curve = match cli.cmd {
        Cmd::Fringes(a) => commands::fringes(a, &mut p, need_seed()?)?,
        Cmd::Ratio(a) => commands::ratio(a, &mut p)?,
        Cmd::QfiBounds(a) => commands::qfi_bounds(a, &mut p)?,
        Cmd::ConfigOpt(a) => {
            let s = seed.unwrap_or(1);
            commands::config_opt(a, &mut p, s)?
        }
        Cmd::Illumination(a) => commands::illumination(a, &mut p, need_seed()?)?,
        Cmd::HolometerRatio(a) => commands::holometer_ratio(a, &mut p)?,
        Cmd::Nrf(a) => commands::nrf(a, &mut p)?,
        Cmd::ListFigures => unreachable!(),
    };
    p.finish()?;
    let figs: Vec<String> = figures::figures_for(sub).iter().map(|n| n.to_string()).collect();
    let info = output::RunInfo {
        subcommand: sub,
        figures: figs.iter().map(String::as_str).collect(),
        seed,
        params: &p.echo,
    };
    let dir = cli.out.unwrap_or_else(|| PathBuf::from("."));
    let name = cli.name.unwrap_or_else(|| sub.to_string());
    let path = output::write_outputs(&dir, &name, &curve, &info)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
