#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use sha2::{Digest, Sha256};

use config::{Command, RunConfig};
use error::CliError;

/// Spin-dependent Bragg splitter and Aharonov-Casher interferometer simulations.
#[derive(Debug, Parser)]
#[command(name = "spinbragg", version)]
struct Cli {
    /// What to run; may instead come from the config file.
    #[arg(value_enum)]
    command: Option<Command>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination, or "-" for stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    scan_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    scan_max: Option<f64>,
    /// Scan points (or time samples for bragg).
    #[arg(long)]
    points: Option<usize>,
    /// ħΩ/𝓔₀ for the lattice pulses.
    #[arg(long)]
    rabi_ratio: Option<f64>,
    /// Ladder window [−N−1, N].
    #[arg(long)]
    truncation: Option<i32>,
    /// Integrate the pulses on the full ladder (interferometer only).
    #[arg(long)]
    numerical: bool,
    #[arg(long, allow_hyphen_values = true)]
    initial_m: Option<i32>,
}

impl Cli {
    fn overrides(&self) -> RunConfig {
        RunConfig {
            command: self.command,
            output: self.output.clone(),
            scan_min: self.scan_min,
            scan_max: self.scan_max,
            points: self.points,
            rabi_ratio: self.rabi_ratio,
            truncation: self.truncation,
            numerical: self.numerical.then_some(true),
            initial_m: self.initial_m,
            ..RunConfig::default()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let (Some(a), Some(b)) = (cli.command, file.command) {
        if a != b {
            return Err(CliError::Usage(format!(
                "command {a:?} conflicts with {b:?} in the config file"
            )));
        }
    }
    let cfg = file.merged(cli.overrides());
    let command = cfg
        .command
        .ok_or_else(|| CliError::Usage("no command given".into()))?;
    let output = cfg
        .output
        .clone()
        .ok_or_else(|| CliError::Usage("no output path given (--output)".into()))?;
    if cfg.numerical == Some(true) && command != Command::Interferometer {
        return Err(CliError::Usage(
            "--numerical applies to interferometer only".into(),
        ));
    }

    let species = commands::load_species(cfg.species_file.as_deref())?;
    let out = match command {
        Command::Polarizability => commands::polarizability(&cfg, &species)?,
        Command::Bragg => commands::bragg(&cfg, &species)?,
        Command::Interferometer => commands::interferometer(&cfg, &species)?,
    };

    let mut hasher = Sha256::new();
    hasher.update(out.resolved.to_string().as_bytes());
    hasher.update(b"\n");
    hasher.update(species.text.as_bytes());
    let digest = hex::encode(hasher.finalize());
    let text = format!(
        "# spinbragg {} config_sha256={digest}\n{}",
        env!("CARGO_PKG_VERSION"),
        out.body
    );

    if output.as_os_str() == "-" {
        eprint!("{}", out.summary);
        std::io::stdout().write_all(text.as_bytes())?;
    } else {
        std::fs::write(&output, text)?;
        print!("{}", out.summary);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
