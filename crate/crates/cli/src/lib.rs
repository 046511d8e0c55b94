//! Command-line front end for the hypercs toolkit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;

use clap::{Parser, Subcommand};
use commands::{render, Report};
use config::{parse_complex, parse_list, parse_tolerance, Format, Overrides, RunConfig};
use error::CliError;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// A comma-separated parameter list as one flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamList(pub Vec<f64>);

impl ParamList {
    fn parse(s: &str) -> Result<Self, String> {
        parse_list(s).map(ParamList)
    }
}

#[derive(Debug, Parser)]
#[command(name = "hypercs", version)]
#[command(about = "Hypergeometric coherent states with diagonal-matrix labels: tables, distributions and verification")]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Upper parameters a_i, comma separated ("" for none).
    #[arg(long, global = true, value_parser = ParamList::parse, allow_hyphen_values = true)]
    pub params_a: Option<ParamList>,

    /// Lower parameters b_j, comma separated ("" for none).
    #[arg(long, global = true, value_parser = ParamList::parse, allow_hyphen_values = true)]
    pub params_b: Option<ParamList>,

    /// Fock-space truncation.
    #[arg(long, global = true)]
    pub n_max: Option<usize>,

    /// Inverse temperature.
    #[arg(long, global = true)]
    pub beta: Option<f64>,

    /// Level spacing of the linear spectrum.
    #[arg(long, global = true)]
    pub hbar_omega: Option<f64>,

    /// Ground energy of the linear spectrum.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub e0: Option<f64>,

    /// Slot-0 label as re,im.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Option<[f64; 2]>,

    /// Slot-1 label as re,im; makes the state a two-slot matrix state.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub sigma: Option<[f64; 2]>,

    /// Named tolerance override, e.g. moment=1e-7 (repeatable).
    #[arg(long, global = true, value_parser = parse_tolerance)]
    pub tol: Vec<(String, f64)>,

    /// Write the machine-readable output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Normalize Husimi Q by the truncated (true) or full (false) series.
    #[arg(long, global = true, action = clap::ArgAction::Set)]
    pub truncate_norm: Option<bool>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate n, e(n), rho(n).
    Structure,
    /// Tabulate coherent-state coefficients and probabilities.
    State,
    /// Run verification suites.
    Verify {
        /// identity, pmoments, entropy, twolevel or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Sample Husimi Q and the P function on a log-spaced grid.
    Distributions {
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long)]
        grid_min: Option<f64>,
        #[arg(long)]
        grid_max: Option<f64>,
    },
}

impl Cli {
    fn overrides(&self) -> Overrides {
        let mut o = Overrides {
            params_a: self.params_a.clone().map(|l| l.0),
            params_b: self.params_b.clone().map(|l| l.0),
            n_max: self.n_max,
            beta: self.beta,
            hbar_omega: self.hbar_omega,
            e0: self.e0,
            z: self.z,
            sigma: self.sigma,
            tol: self.tol.clone(),
            out: self.out.clone(),
            format: self.format,
            truncate_norm: self.truncate_norm,
            ..Overrides::default()
        };
        if let Command::Distributions { grid_points, grid_min, grid_max } = &self.command {
            o.grid_points = *grid_points;
            o.grid_min = *grid_min;
            o.grid_max = *grid_max;
        }
        o
    }
}

fn emit(report: &impl Report, config: &RunConfig) -> Result<bool, CliError> {
    let text = render(report, config.format)?;
    match &config.output_path {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    eprintln!("{}", report.summary());
    Ok(report.passed())
}

/// Runs one invocation and returns whether every check passed.
pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let config = RunConfig::resolve(cli.config.as_deref(), &cli.overrides())?;
    log::info!("resolved configuration: {config:?}");
    match &cli.command {
        Command::Structure => emit(&commands::cmd_structure(&config)?, &config),
        Command::State => emit(&commands::cmd_state(&config)?, &config),
        Command::Verify { suite } => emit(&commands::cmd_verify(&config, suite)?, &config),
        Command::Distributions { .. } => emit(&commands::cmd_distributions(&config)?, &config),
    }
}

/// Exit codes: 0 all passed, 1 numeric failure, 2 usage or configuration error.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> ExitCode {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
