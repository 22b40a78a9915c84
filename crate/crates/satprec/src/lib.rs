//! Command-line front end for `satprec-core`.
//!
//! Each subcommand reads one TOML or JSON config and writes its data under
//! `--out`, named after the config file. CSV files start with `#` manifest
//! lines; JSON files carry the manifest under a `manifest` key.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
mod error;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use error::CliError;
pub use output::{Format, RunManifest, Sink, Table};

#[derive(Debug, Parser)]
#[command(name = "satprec", version, about = "Precision limits for absorption measurements of saturable samples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmission profile through the sample for several probe strengths.
    Transmission(RunArgs),
    /// Coherent FI and quantum bound against probe strength.
    FisherSweep(RunArgs),
    /// Closed-form and numerical optimal probe strength and sample length.
    Optimize(RunArgs),
    /// Fock-probe power needed to match a coherent probe's precision.
    PowerReduction(RunArgs),
    /// Amplitude-squeezed FI relative to the quantum bound.
    Squeezed(RunArgs),
    /// Slice-by-slice Lindblad propagation of the probe.
    Simulate(RunArgs),
    /// Thermometry-cell scenario report.
    Dbt(RunArgs),
    /// Solution-phase absorber scenario report.
    Chlorophyll(RunArgs),
    /// Randomized identity checks driven by --seed.
    Verify(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Defaults to csv for tables and json for reports.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Transmission(_) => "transmission",
            Command::FisherSweep(_) => "fisher-sweep",
            Command::Optimize(_) => "optimize",
            Command::PowerReduction(_) => "power-reduction",
            Command::Squeezed(_) => "squeezed",
            Command::Simulate(_) => "simulate",
            Command::Dbt(_) => "dbt",
            Command::Chlorophyll(_) => "chlorophyll",
            Command::Verify(_) => "verify",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Transmission(a)
            | Command::FisherSweep(a)
            | Command::Optimize(a)
            | Command::PowerReduction(a)
            | Command::Squeezed(a)
            | Command::Simulate(a)
            | Command::Dbt(a)
            | Command::Chlorophyll(a)
            | Command::Verify(a) => a,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Optimize(_) | Command::Dbt(_) | Command::Chlorophyll(_) => Format::Json,
            _ => Format::Csv,
        }
    }
}

fn sink(command: &Command) -> Sink {
    let args = command.args();
    Sink {
        manifest: RunManifest {
            tool_version: output::TOOL_VERSION.to_string(),
            subcommand: command.name().to_string(),
            config_path: args.config.clone(),
            output_dir: args.out.clone(),
            seed: args.seed,
        },
        format: args.format.unwrap_or_else(|| command.default_format()),
        stem: stem(&args.config),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("output")
        .to_string()
}

/// Runs one subcommand, returning the files written.
pub fn run(command: &Command) -> Result<Vec<PathBuf>, CliError> {
    let out = sink(command);
    let path = command.args().config.as_path();
    let written = match command {
        Command::Transmission(_) => vec![out.table(&commands::transmission_table(&config::load(path)?)?)?],
        Command::FisherSweep(_) => vec![out.table(&commands::fisher_sweep_table(&config::load(path)?)?)?],
        Command::Optimize(_) => vec![out.report(&commands::optimize_report(&config::load(path)?)?)?],
        Command::PowerReduction(_) => vec![out.table(&commands::power_reduction_table(&config::load(path)?)?)?],
        Command::Squeezed(_) => vec![out.table(&commands::squeezed_table(&config::load(path)?)?)?],
        Command::Simulate(_) => {
            let (trace, summary) = commands::simulate(&config::load(path)?)?;
            match out.format {
                Format::Csv => vec![out.table(&commands::slice_table(&trace))?, out.sidecar(&summary)?],
                Format::Json => vec![out.report(&serde_json::json!({ "summary": summary, "slices": trace.slices }))?],
            }
        }
        Command::Dbt(_) => vec![out.report(&commands::dbt_report(&config::load(path)?)?)?],
        Command::Chlorophyll(_) => vec![out.report(&commands::chlorophyll_report(&config::load(path)?)?)?],
        Command::Verify(a) => {
            let table = commands::verify_table(&config::load(path)?, a.seed.unwrap_or(0))?;
            vec![out.table(&table)?]
        }
    };
    Ok(written)
}
