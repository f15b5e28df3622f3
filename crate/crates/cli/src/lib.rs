//! Command-line front end for `railnoise-core`.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical
//! failure (undamped resonance, solver), 4 I/O error.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod profiles;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{CompareArgs, EndArg};
use crate::config::LoadedConfig;
use crate::error::{CliError, CliResult};
use crate::output::Format;

pub const CONFIG_ENV: &str = "RAILNOISE_CONFIG";

#[derive(Debug, Parser)]
#[command(name = "railnoise", version, about = "Vibration-induced phase noise of a rail-mounted atom interferometer")]
pub struct Cli {
    /// TOML configuration file. Falls back to $RAILNOISE_CONFIG.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Bundled profile instead of a file: paper, paper-noise, seismic-synth.
    #[arg(long, global = true, value_name = "NAME")]
    pub profile: Option<String>,

    /// Override a configuration value, e.g. --set suspension.stiffness=2e6.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub sets: Vec<String>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bending resonances of the free rail and their Q factors.
    Modes {
        /// Highest mode index (default from [modes] n_max).
        #[arg(long)]
        n_max: Option<usize>,
        /// Also report the end damping that gives each mode this Q.
        #[arg(long, value_name = "Q")]
        damping_for_q: Option<f64>,
    },
    /// Pendular resonances of the rail on its supports.
    Pendular,
    /// Rail amplitudes a(nu), b(nu) per unit motion of one support.
    Response {
        #[arg(long)]
        nu_min: Option<f64>,
        #[arg(long)]
        nu_max: Option<f64>,
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[arg(long, value_enum, default_value = "plus")]
        end: EndArg,
    },
    /// Phase-noise spectrum and band integrals; writes phase_noise.* and summary.json.
    PhaseNoise {
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
    /// RMS grating misalignment over the band.
    RmsBending,
    /// Fringe visibility against diffraction order.
    Visibility {
        #[command(subcommand)]
        mode: VisibilityMode,
    },
    /// Sample the [noise.synth] power law to a spectrum file.
    SynthNoise {
        /// Output file (stdout if omitted).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Comment line for the file header; repeatable.
        #[arg(long)]
        comment: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum VisibilityMode {
    /// V(p) for p = 0..max_order.
    Forward {
        #[arg(long)]
        v_max: Option<f64>,
        #[arg(long)]
        phi1_sq: Option<f64>,
        #[arg(long)]
        max_order: Option<u32>,
    },
    /// Fit V_max and <Phi_1^2> to measured visibilities.
    Fit {
        /// CSV of order,visibility[,sigma].
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Ratio of a predicted <Phi_1^2> to the fitted one.
    Compare {
        /// Predicted <Phi^2>/p^2, rad^2.
        #[arg(long)]
        predicted: Option<f64>,
        /// summary.json written by phase-noise.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        phi1_sq: Option<f64>,
    },
}

impl Cli {
    fn config_path(&self) -> Option<PathBuf> {
        self.config.clone().or_else(|| match self.profile {
            Some(_) => None,
            None => std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
        })
    }

    fn load(&self) -> CliResult<LoadedConfig> {
        config::load(self.config_path().as_deref(), self.profile.as_deref(), &self.sets)
    }

    fn load_optional(&self) -> CliResult<Option<LoadedConfig>> {
        if self.config_path().is_none() && self.profile.is_none() {
            if !self.sets.is_empty() {
                return Err(CliError::Config("--set needs a configuration".into()));
            }
            return Ok(None);
        }
        self.load().map(Some)
    }
}

/// Runs one command, writing its report to `out`.
pub fn run<W: Write>(cli: &Cli, out: &mut W) -> CliResult<()> {
    let report = match &cli.command {
        Command::Modes { n_max, damping_for_q } => commands::modes(&cli.load()?, *n_max, *damping_for_q)?,
        Command::Pendular => commands::pendular(&cli.load()?)?,
        Command::Response { nu_min, nu_max, points, end } => {
            commands::response(&cli.load()?, *nu_min, *nu_max, *points, *end)?
        }
        Command::PhaseNoise { output_dir } => commands::phase_noise(&cli.load()?, output_dir, cli.format)?,
        Command::RmsBending => commands::rms_bending(&cli.load()?)?,
        Command::Visibility { mode } => {
            let cfg = cli.load_optional()?;
            match mode {
                VisibilityMode::Forward { v_max, phi1_sq, max_order } => {
                    commands::visibility_forward(cfg.as_ref(), *v_max, *phi1_sq, *max_order)?
                }
                VisibilityMode::Fit { data } => commands::visibility_fit(cfg.as_ref(), data.as_deref())?,
                VisibilityMode::Compare { predicted, summary, data, phi1_sq } => commands::visibility_compare(
                    cfg.as_ref(),
                    &CompareArgs {
                        predicted: *predicted,
                        summary: summary.clone(),
                        data: data.clone(),
                        phi1_sq: *phi1_sq,
                    },
                )?,
            }
        }
        Command::SynthNoise { output, comment } => {
            let bytes = commands::synth_noise(&cli.load()?, comment, cli.format)?;
            match output {
                Some(path) => {
                    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
                }
                None => out.write_all(&bytes)?,
            }
            return Ok(());
        }
    };
    report.write(cli.format, out)
}
