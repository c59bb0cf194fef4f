//! Command-line front end.
//!
//! ```text
//! qrsim validate <config> [--set key=value]...
//! qrsim simulate <config> [-o out.csv] [--format csv|json] [--set key=value]...
//! qrsim sweep    <config> ...
//! qrsim compare  <config> ...
//! qrsim fidelity <config> ...
//! ```
//!
//! Without `-o` the table goes to standard output. Warnings go to standard
//! error. The exit status is 0 on success, 1 on any error, 2 on bad usage.

mod config;
mod output;

pub use config::{
    parse_config, parse_config_str, ExperimentSettings, LoadedConfig, OracleSettings, Settings,
    DEFAULT_N_STEPS, DEFAULT_T_END_KAPPA_TIMES, SCHEMA,
};
pub use output::{format_number, from_json, read_json, render, to_csv, to_json, write_output, Format};

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::{run, run_fidelity_vs_tau, run_trajectory, ExperimentKind, ResultTable};

#[derive(Debug, Parser)]
#[command(name = "qrsim", version, about = "Driven qubit-resonator simulator")]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and check a config, then print it with every default filled in.
    Validate(ConfigArgs),
    /// One ⟨σ_z⟩ trajectory: master equation if the oracle is enabled,
    /// rate equation otherwise.
    Simulate(RunArgs),
    /// The experiment named by `experiment.kind`.
    Sweep(RunArgs),
    /// Closed form against the master equation (oracle forced on).
    /// Defaults to relaxation_compare.
    Compare(RunArgs),
    /// Fidelity against measurement time over an `experiment.sweep` of `tau`.
    Fidelity(RunArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// TOML configuration file.
    pub config: PathBuf,
    /// Override a config value, e.g. `epsilon=0.5` or `oracle.n_fock=12`.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Output format; taken from the output extension when omitted.
    #[arg(short, long, value_enum)]
    pub format: Option<Format>,
}

const COMPARE_KINDS: [ExperimentKind; 3] = [
    ExperimentKind::RelaxationCompare,
    ExperimentKind::StationaryCompare,
    ExperimentKind::PhotonPullSweep,
];

/// Resolves the experiment a subcommand runs and executes it.
pub fn build_table(command: &Command) -> Result<ResultTable> {
    let args = match command {
        Command::Validate(_) => {
            return Err(Error::InvalidExperiment("validate produces no table".into()));
        }
        Command::Simulate(a) | Command::Sweep(a) | Command::Compare(a) | Command::Fidelity(a) => a,
    };
    let loaded = parse_config(&args.config.config, &args.config.overrides)?;
    let mut settings = loaded.settings;
    let given = settings.experiment.kind;
    let kind = match command {
        Command::Simulate(_) => given.unwrap_or(ExperimentKind::RateEquationDemo),
        Command::Sweep(_) => given.ok_or_else(|| {
            Error::InvalidExperiment("sweep needs experiment.kind".into())
        })?,
        Command::Compare(_) => {
            let kind = given.unwrap_or(ExperimentKind::RelaxationCompare);
            if !COMPARE_KINDS.contains(&kind) {
                return Err(Error::InvalidExperiment(format!(
                    "compare runs relaxation_compare, stationary_compare or photon_pull_sweep, not {}",
                    kind.name()
                )));
            }
            settings.oracle.enabled = true;
            kind
        }
        Command::Fidelity(_) => match given {
            None | Some(ExperimentKind::FidelityVsTau) => ExperimentKind::FidelityVsTau,
            Some(other) => {
                return Err(Error::InvalidExperiment(format!(
                    "fidelity runs fidelity_vs_tau, not {}",
                    other.name()
                )))
            }
        },
        Command::Validate(_) => unreachable!("handled above"),
    };
    settings.experiment.kind = Some(kind);
    let cfg = settings.experiment_config(kind)?;
    let mut table = match command {
        Command::Simulate(_) => run_trajectory(&cfg)?,
        Command::Fidelity(_) => run_fidelity_vs_tau(&cfg)?,
        _ => run(&cfg)?,
    };
    table.provenance.settings =
        Some(serde_json::to_value(&settings).map_err(|e| Error::Io(e.to_string()))?);
    Ok(table)
}

/// Runs one invocation, writing results and warnings. Returns the warnings
/// reported on standard error.
pub fn execute(inv: &Invocation) -> Result<Vec<String>> {
    match &inv.command {
        Command::Validate(a) => {
            let loaded = parse_config(&a.config, &a.overrides)?;
            let text = toml::to_string(&loaded.settings).map_err(|e| Error::Io(e.to_string()))?;
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(loaded.warnings.iter().map(|w| w.to_string()).collect())
        }
        Command::Simulate(a) | Command::Sweep(a) | Command::Compare(a) | Command::Fidelity(a) => {
            let table = build_table(&inv.command)?;
            let format = a
                .format
                .or_else(|| a.output.as_deref().map(Format::from_path))
                .unwrap_or_default();
            match &a.output {
                Some(path) => write_output(&table, path, format)?,
                None => std::io::stdout().write_all(render(&table, format)?.as_bytes())?,
            }
            Ok(table.warnings.clone())
        }
    }
}

/// Entry point; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let inv = match Invocation::try_parse_from(args) {
        Ok(inv) => inv,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&inv) {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
