mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Failure;
use crate::config::{RunConfig, KEYS};

#[derive(Parser)]
#[command(
    name = "beurling",
    version,
    about = "Solve and certify conformal free boundary problems |f'| = Φ(ξ, f) on the unit circle",
    after_help = config_help()
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Initial grid size (power of two).
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Damping parameter in (0, 1].
    #[arg(long, global = true)]
    theta: Option<f64>,

    /// Update tolerance of the iteration.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Outputs to write, among csv,svg,json.
    #[arg(long, global = true)]
    emit: Option<String>,

    /// Extra KEY=VALUE overrides, applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the fixed-point solver and write report, boundary trace and coefficients.
    Solve,
    /// Run certificates on a map loaded from a coefficient CSV (key `map`).
    Certify,
    /// Radial solution scan plus monotonicity and superharmonicity checks.
    Scan,
    /// Region algebra on PBM inputs or the shrinking-spiral demo.
    Geometry,
    /// Coefficient decay and second-derivative cross-check.
    Spectrum,
}

fn config_help() -> String {
    let mut text = String::from("Config keys (also accepted by --set):\n");
    for (key, meaning) in KEYS {
        text.push_str(&format!("  {key:<13} {meaning}\n"));
    }
    text.push_str("\nExit codes: 0 success, 1 solve or certificate failure, 2 configuration error.");
    text
}

fn build_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let flags = [
        ("out", cli.out.as_ref().map(|p| p.display().to_string())),
        ("grid", cli.n.map(|v| v.to_string())),
        ("damping", cli.theta.map(|v| v.to_string())),
        ("tol_update", cli.tol.map(|v| v.to_string())),
        ("emit", cli.emit.clone()),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            config.set(key, &value)?;
        }
    }
    for item in &cli.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--set expects KEY=VALUE, got {item:?}")))?;
        config.set(key.trim(), value.trim())?;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(&cli).and_then(|config| match cli.command {
        Command::Solve => commands::cmd_solve(&config),
        Command::Certify => commands::cmd_certify(&config),
        Command::Scan => commands::cmd_scan(&config),
        Command::Geometry => commands::cmd_geometry(&config),
        Command::Spectrum => commands::cmd_spectrum(&config),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
    }
}
