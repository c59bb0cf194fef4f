//! TOML configuration files.
//!
//! Sections `[system]`, `[grid]`, `[oracle]`, `[experiment]` and
//! `[experiment.sweep]`. Keys outside [`SCHEMA`] are rejected. Every default
//! is applied in [`resolve`]; the result is a [`Settings`] value with no
//! optional physics left, which is what provenance records.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytic::RateVariant;
use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, ExperimentKind, Sweep, DEFAULT_SETTLE_KAPPA_TIMES, DEFAULT_SIGMA_Z0};
use crate::model::{n_th_from_temperature, validate, SystemParams, TimeGrid, Warning};
use crate::oracle::{Coupling, Frame, HilbertSpec, OracleConfig, Propagation, DEFAULT_N_FOCK};

/// Known keys per section.
pub const SCHEMA: [(&str, &[&str]); 5] = [
    (
        "system",
        &["omega_q", "omega_r", "omega_d", "g", "kappa", "epsilon", "n_th", "temperature_ratio"],
    ),
    ("grid", &["t_start", "t_end", "n_steps"]),
    ("oracle", &["enabled", "n_fock", "frame", "coupling", "dt", "propagation"]),
    ("experiment", &["kind", "sigma_z0", "variant", "settle_time", "sweep"]),
    ("experiment.sweep", &["parameter", "values", "start", "stop", "count"]),
];

/// Grid end in units of 1/κ when `grid.t_end` is absent.
pub const DEFAULT_T_END_KAPPA_TIMES: f64 = 10.0;
pub const DEFAULT_N_STEPS: usize = 1000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    system: SystemSection,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    oracle: OracleSection,
    #[serde(default)]
    experiment: ExperimentSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    omega_q: f64,
    omega_r: f64,
    omega_d: Option<f64>,
    g: f64,
    kappa: f64,
    epsilon: Option<f64>,
    n_th: Option<f64>,
    temperature_ratio: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    t_start: Option<f64>,
    t_end: Option<f64>,
    n_steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleSection {
    enabled: Option<bool>,
    n_fock: Option<usize>,
    frame: Option<Frame>,
    coupling: Option<Coupling>,
    dt: Option<f64>,
    propagation: Option<Propagation>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    kind: Option<ExperimentKind>,
    sigma_z0: Option<f64>,
    variant: Option<RateVariant>,
    settle_time: Option<f64>,
    sweep: Option<SweepSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    parameter: String,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
}

/// Fully resolved configuration, laid out like the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub system: SystemParams,
    pub grid: TimeGrid,
    pub oracle: OracleSettings,
    pub experiment: ExperimentSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    pub enabled: bool,
    pub n_fock: usize,
    pub frame: Frame,
    pub coupling: Coupling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub propagation: Propagation,
}

impl OracleSettings {
    pub fn config(&self) -> Result<OracleConfig> {
        let cfg = OracleConfig {
            frame: self.frame,
            coupling: self.coupling,
            dt: self.dt,
            hilbert: HilbertSpec::new(self.n_fock)?,
            propagation: self.propagation,
        };
        cfg.check()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    /// Absent when the file leaves the choice to the subcommand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    pub sigma_z0: f64,
    pub variant: RateVariant,
    pub settle_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

impl Settings {
    /// The experiment described by these settings, run as `kind`.
    pub fn experiment_config(&self, kind: ExperimentKind) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(kind, self.system, self.grid);
        cfg.sweep = self.experiment.sweep.clone();
        cfg.sigma_z0 = self.experiment.sigma_z0;
        cfg.variant = self.experiment.variant;
        cfg.settle_time = self.experiment.settle_time;
        if self.oracle.enabled {
            cfg.oracle = Some(self.oracle.config()?);
        }
        cfg.check()?;
        Ok(cfg)
    }
}

/// A parsed configuration and the advisory warnings raised while checking it.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub settings: Settings,
    pub warnings: Vec<Warning>,
}

impl LoadedConfig {
    pub fn params(&self) -> SystemParams {
        self.settings.system
    }

    pub fn grid(&self) -> TimeGrid {
        self.settings.grid
    }
}

/// Reads, overrides, resolves and validates a configuration file.
pub fn parse_config(path: &Path, overrides: &[String]) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text, overrides)
}

pub fn parse_config_str(text: &str, overrides: &[String]) -> Result<LoadedConfig> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, &e))?;
    check_keys(&table)?;
    // typed pass over the original text so type errors carry a location
    let _: FileConfig = toml::from_str(text).map_err(|e| parse_error(text, &e))?;

    for item in overrides {
        apply_override(&mut table, item)?;
    }
    let file: FileConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::Parse {
        line: 0,
        column: 0,
        message: format!("after overrides: {}", e.message()),
    })?;
    let settings = resolve(file)?;
    let warnings = validate(&settings.system)?;
    if settings.oracle.enabled {
        settings.oracle.config()?;
    }
    settings.grid.check()?;
    Ok(LoadedConfig { settings, warnings })
}

fn parse_error(text: &str, e: &toml::de::Error) -> Error {
    let (line, column) = match e.span() {
        Some(span) => line_column(text, span.start),
        None => (0, 0),
    };
    Error::Parse {
        line,
        column,
        message: e.message().trim().to_string(),
    }
}

/// One-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn known_keys(section: &str) -> Option<&'static [&'static str]> {
    SCHEMA.iter().find(|(name, _)| *name == section).map(|(_, keys)| *keys)
}

fn check_keys(table: &toml::Table) -> Result<()> {
    for (section, value) in table {
        if known_keys(section).is_none() || section.contains('.') {
            return Err(Error::UnknownKey(section.clone()));
        }
        check_section(section, value)?;
    }
    Ok(())
}

fn check_section(path: &str, value: &toml::Value) -> Result<()> {
    let keys = known_keys(path).expect("section checked by caller");
    let toml::Value::Table(t) = value else {
        return Err(Error::Parse {
            line: 0,
            column: 0,
            message: format!("`{path}` must be a table"),
        });
    };
    for (key, v) in t {
        let full = format!("{path}.{key}");
        if !keys.contains(&key.as_str()) {
            return Err(Error::UnknownKey(full));
        }
        if known_keys(&full).is_some() {
            check_section(&full, v)?;
        }
    }
    Ok(())
}

/// Expands a bare override key to its dotted path.
fn resolve_key(key: &str) -> Result<Vec<String>> {
    let path = if key.contains('.') {
        key.to_string()
    } else {
        let owners: Vec<&str> = SCHEMA
            .iter()
            .filter(|(_, keys)| keys.contains(&key))
            .map(|(section, _)| *section)
            .collect();
        match owners.as_slice() {
            [section] => format!("{section}.{key}"),
            [] => return Err(Error::UnknownKey(key.to_string())),
            _ => {
                return Err(Error::Parse {
                    line: 0,
                    column: 0,
                    message: format!("override key `{key}` is ambiguous; qualify it with its section"),
                })
            }
        }
    };
    let (section, leaf) = path.rsplit_once('.').expect("dotted path");
    match known_keys(section) {
        Some(keys) if keys.contains(&leaf) && known_keys(&path).is_none() => {}
        _ => return Err(Error::UnknownKey(path)),
    }
    Ok(path.split('.').map(str::to_string).collect())
}

/// Applies one `key=value` override. The value is read as a TOML value and
/// falls back to a bare string.
fn apply_override(table: &mut toml::Table, item: &str) -> Result<()> {
    let (key, raw) = item.split_once('=').ok_or_else(|| Error::Parse {
        line: 0,
        column: 0,
        message: format!("override `{item}` is not of the form key=value"),
    })?;
    let path = resolve_key(key.trim())?;
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let (leaf, sections) = path.split_last().expect("non-empty path");
    let mut cursor = table;
    for s in sections {
        let entry = cursor
            .entry(s.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = match entry {
            toml::Value::Table(t) => t,
            _ => {
                return Err(Error::Parse {
                    line: 0,
                    column: 0,
                    message: format!("`{s}` is not a table"),
                })
            }
        };
    }
    cursor.insert(leaf.clone(), value);
    Ok(())
}

fn resolve(file: FileConfig) -> Result<Settings> {
    let s = file.system;
    let n_th = match (s.n_th, s.temperature_ratio) {
        (Some(n), _) => n,
        (None, Some(ratio)) => n_th_from_temperature(ratio)?,
        (None, None) => 0.0,
    };
    let system = SystemParams {
        omega_q: s.omega_q,
        omega_r: s.omega_r,
        omega_d: s.omega_d.unwrap_or(s.omega_r),
        g: s.g,
        kappa: s.kappa,
        epsilon: s.epsilon.unwrap_or(0.0),
        n_th,
        temperature_ratio: s.temperature_ratio,
    };
    if !(system.kappa > 0.0) {
        return Err(Error::NonPositiveRate {
            field: "kappa",
            value: system.kappa,
        });
    }

    let grid = TimeGrid {
        t_start: file.grid.t_start.unwrap_or(0.0),
        t_end: file
            .grid
            .t_end
            .unwrap_or(file.grid.t_start.unwrap_or(0.0) + DEFAULT_T_END_KAPPA_TIMES / system.kappa),
        n_steps: file.grid.n_steps.unwrap_or(DEFAULT_N_STEPS),
    };

    let o = file.oracle;
    let oracle = OracleSettings {
        enabled: o.enabled.unwrap_or(false),
        n_fock: o.n_fock.unwrap_or(DEFAULT_N_FOCK),
        frame: o.frame.unwrap_or_default(),
        coupling: o.coupling.unwrap_or_default(),
        dt: o.dt,
        propagation: o.propagation.unwrap_or_default(),
    };

    let e = file.experiment;
    let sweep = e.sweep.map(resolve_sweep).transpose()?;
    let experiment = ExperimentSettings {
        kind: e.kind,
        sigma_z0: e.sigma_z0.unwrap_or(DEFAULT_SIGMA_Z0),
        variant: e.variant.unwrap_or_default(),
        settle_time: e.settle_time.unwrap_or(DEFAULT_SETTLE_KAPPA_TIMES / system.kappa),
        sweep,
    };
    Ok(Settings {
        system,
        grid,
        oracle,
        experiment,
    })
}

fn resolve_sweep(s: SweepSection) -> Result<Sweep> {
    match (s.values, s.start, s.stop, s.count) {
        (Some(values), None, None, None) => Ok(Sweep::new(&s.parameter, values)),
        (None, Some(start), Some(stop), Some(count)) => Ok(Sweep::linspace(&s.parameter, start, stop, count)),
        _ => Err(Error::InvalidExperiment(
            "experiment.sweep needs either `values` or all of `start`, `stop`, `count`".into(),
        )),
    }
}
