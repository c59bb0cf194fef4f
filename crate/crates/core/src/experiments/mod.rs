//! Declarative experiments producing rectangular numeric tables.
//!
//! Every runner takes an [`ExperimentConfig`] and returns a [`ResultTable`]
//! whose provenance holds the resolved configuration. Sweep points are
//! evaluated in parallel and gathered in sweep order; the worker count comes
//! from `QRSIM_THREADS` when set.

mod analysis;
mod fidelity;
mod pull;
mod rate_demo;
mod relaxation;
mod table;

pub use analysis::{local_extrema, log_linear_rate, quadratic_peak, Extremum};
pub use fidelity::run_fidelity_vs_tau;
pub use pull::run_photon_pull_sweep;
pub use rate_demo::run_rate_equation_demo;
pub use relaxation::{classify_regime, run_relaxation_compare, run_stationary_compare, Regime};
pub use table::{Provenance, ResultTable};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{integrate_sigma_z_sampled, rate_step_limit, RateVariant};
use crate::error::{Error, Result};
use crate::model::{validate, SystemParams, TimeGrid, Warning};
use crate::oracle::{ensemble_initial_state, evolve, OracleConfig, StateDiagnostics};

/// Environment variable holding the sweep worker count.
pub const THREADS_ENV: &str = "QRSIM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    PhotonPullSweep,
    FidelityVsTau,
    RelaxationCompare,
    StationaryCompare,
    RateEquationDemo,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PhotonPullSweep => "photon_pull_sweep",
            ExperimentKind::FidelityVsTau => "fidelity_vs_tau",
            ExperimentKind::RelaxationCompare => "relaxation_compare",
            ExperimentKind::StationaryCompare => "stationary_compare",
            ExperimentKind::RateEquationDemo => "rate_equation_demo",
        }
    }
}

/// A named parameter and the ordered values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: String,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn new(parameter: &str, values: Vec<f64>) -> Self {
        Sweep {
            parameter: parameter.to_string(),
            values,
        }
    }

    /// `count` evenly spaced values from `start` to `end` inclusive.
    pub fn linspace(parameter: &str, start: f64, end: f64, count: usize) -> Self {
        let values = match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|k| start + (end - start) * k as f64 / (count - 1) as f64)
                .collect(),
        };
        Sweep::new(parameter, values)
    }
}

pub const DEFAULT_SIGMA_Z0: f64 = -1.0;
/// Settling time for conditional photon numbers, in units of 1/κ.
pub const DEFAULT_SETTLE_KAPPA_TIMES: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub base: SystemParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    pub grid: TimeGrid,
    /// Absent means closed-form results only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    pub sigma_z0: f64,
    pub variant: RateVariant,
    /// Time allowed for the field to settle before photon numbers are read.
    pub settle_time: f64,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, base: SystemParams, grid: TimeGrid) -> Self {
        ExperimentConfig {
            kind,
            base,
            sweep: None,
            grid,
            oracle: None,
            sigma_z0: DEFAULT_SIGMA_Z0,
            variant: RateVariant::default(),
            settle_time: DEFAULT_SETTLE_KAPPA_TIMES / base.kappa,
        }
    }

    pub fn with_sweep(mut self, sweep: Sweep) -> Self {
        self.sweep = Some(sweep);
        self
    }

    pub fn with_oracle(mut self, oracle: OracleConfig) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn check(&self) -> Result<()> {
        validate(&self.base)?;
        self.grid.check()?;
        if let Some(oracle) = &self.oracle {
            oracle.check()?;
        }
        if !(self.sigma_z0.abs() <= 1.0) {
            return Err(Error::SigmaOutOfRange(self.sigma_z0));
        }
        if !(self.settle_time > 0.0 && self.settle_time.is_finite()) {
            return Err(Error::InvalidExperiment(format!(
                "settle_time must be positive (got {})",
                self.settle_time
            )));
        }
        if let Some(sweep) = &self.sweep {
            let known = SystemParams::FIELD_NAMES.contains(&sweep.parameter.as_str())
                || (sweep.parameter == "tau" && self.kind == ExperimentKind::FidelityVsTau);
            if !known {
                return Err(Error::InvalidExperiment(format!(
                    "unknown sweep parameter `{}`",
                    sweep.parameter
                )));
            }
            if sweep.values.is_empty() {
                return Err(Error::InvalidExperiment("sweep has no values".into()));
            }
            if let Some(v) = sweep.values.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidExperiment(format!("non-finite sweep value {v}")));
            }
        }
        Ok(())
    }

    /// Base parameters with the sweep applied at each value; the base alone
    /// when there is no sweep over a system parameter.
    pub(crate) fn points(&self) -> Result<Vec<(Option<f64>, SystemParams)>> {
        match &self.sweep {
            Some(sweep) if sweep.parameter != "tau" => sweep
                .values
                .iter()
                .map(|&v| {
                    let mut p = self.base;
                    p.set_field(&sweep.parameter, v)?;
                    Ok((Some(v), p))
                })
                .collect(),
            _ => Ok(vec![(None, self.base)]),
        }
    }

    pub(crate) fn require_oracle(&self) -> Result<OracleConfig> {
        self.oracle.ok_or_else(|| {
            Error::InvalidExperiment(format!("{} needs an oracle configuration", self.kind.name()))
        })
    }

    pub(crate) fn require_sweep(&self, parameter: &str) -> Result<&Sweep> {
        match &self.sweep {
            Some(s) if s.parameter == parameter => Ok(s),
            _ => Err(Error::InvalidExperiment(format!(
                "{} sweeps `{parameter}`",
                self.kind.name()
            ))),
        }
    }
}

/// Runs the experiment named by `cfg.kind`.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    match cfg.kind {
        ExperimentKind::PhotonPullSweep => run_photon_pull_sweep(cfg),
        ExperimentKind::FidelityVsTau => run_fidelity_vs_tau(cfg),
        ExperimentKind::RelaxationCompare => run_relaxation_compare(cfg),
        ExperimentKind::StationaryCompare => run_stationary_compare(cfg),
        ExperimentKind::RateEquationDemo => run_rate_equation_demo(cfg),
    }
}

/// A single σ_z trajectory on `cfg.grid`: the master equation when an oracle is
/// configured, otherwise the rate equation of `cfg.variant`.
pub fn run_trajectory(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.check()?;
    let mut table = ResultTable::new(
        &["t", "sigma_z", "photon_number", "re_a", "im_a"],
        cfg,
    );
    table.add_warnings(validate(&cfg.base)?);
    let traj = match cfg.oracle {
        Some(oracle) => {
            let rho0 = ensemble_initial_state(&cfg.base, oracle.hilbert, cfg.sigma_z0)?;
            let run = evolve(&rho0, &cfg.grid, &cfg.base, &oracle)?;
            table.add_warnings(run.warnings);
            table.record_diagnostics(&run.diagnostics);
            run.trajectory
        }
        None => {
            let substeps = analytic_substeps(&cfg.grid, &cfg.base);
            integrate_sigma_z_sampled(cfg.sigma_z0, &cfg.grid, &cfg.base, cfg.variant, substeps)?
        }
    };
    for k in 0..traj.len() {
        table.push_row(vec![
            traj.times[k],
            traj.sigma_z[k],
            traj.photon_number[k],
            traj.re_a[k],
            traj.im_a[k],
        ])?;
    }
    Ok(table)
}

/// RK4 substeps per grid interval needed by the rate-equation step guard.
pub(crate) fn analytic_substeps(grid: &TimeGrid, params: &SystemParams) -> usize {
    ((grid.dt() / rate_step_limit(params)) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Maps `f` over `items` in parallel, keeping input order.
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidExperiment(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Oracle health numbers and warnings folded over several runs.
#[derive(Debug, Clone, Default)]
pub(crate) struct OracleHealth {
    pub diagnostics: Option<StateDiagnostics>,
    pub warnings: Vec<Warning>,
}

impl OracleHealth {
    pub fn absorb(&mut self, diagnostics: &StateDiagnostics, warnings: &[Warning]) {
        match &mut self.diagnostics {
            Some(d) => d.merge(diagnostics),
            None => self.diagnostics = Some(*diagnostics),
        }
        self.warnings.extend_from_slice(warnings);
    }

    pub fn write_to(self, table: &mut ResultTable) {
        if let Some(d) = &self.diagnostics {
            table.record_diagnostics(d);
        }
        table.add_warnings(self.warnings);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn suite() -> SystemParams {
        SystemParams {
            omega_q: 5400.0,
            omega_r: 5000.0,
            omega_d: 5000.0,
            g: 20.0,
            kappa: 1.0,
            epsilon: std::f64::consts::FRAC_1_SQRT_2,
            n_th: 0.2,
            temperature_ratio: None,
        }
    }

    #[test]
    fn sweep_parameter_must_exist() {
        let grid = TimeGrid::new(0.0, 1.0, 10).unwrap();
        let cfg = ExperimentConfig::new(ExperimentKind::StationaryCompare, suite(), grid)
            .with_sweep(Sweep::new("epsilonn", vec![1.0]));
        assert!(matches!(cfg.check(), Err(Error::InvalidExperiment(_))));
        let cfg = ExperimentConfig::new(ExperimentKind::StationaryCompare, suite(), grid)
            .with_sweep(Sweep::new("tau", vec![1.0]));
        assert!(cfg.check().is_err());
        let cfg = ExperimentConfig::new(ExperimentKind::StationaryCompare, suite(), grid)
            .with_sweep(Sweep::new("epsilon", vec![]));
        assert!(cfg.check().is_err());
        let cfg = ExperimentConfig::new(ExperimentKind::StationaryCompare, suite(), grid)
            .with_sweep(Sweep::new("epsilon", vec![f64::NAN]));
        assert!(cfg.check().is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let s = Sweep::linspace("omega_d", 4997.0, 5003.0, 21);
        assert_eq!(s.values.len(), 21);
        assert_eq!(s.values[0], 4997.0);
        assert_eq!(s.values[20], 5003.0);
        assert!((s.values[1] - 4997.3).abs() < 1e-9);
    }

    #[test]
    fn parallel_map_keeps_order() {
        let items: Vec<usize> = (0..50).collect();
        let out = par_map(&items, |&i| Ok(i * i)).unwrap();
        assert_eq!(out, items.iter().map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn analytic_trajectory_table() {
        let grid = TimeGrid::new(0.0, 0.1, 20).unwrap();
        let cfg = ExperimentConfig::new(ExperimentKind::RateEquationDemo, suite(), grid);
        let table = run_trajectory(&cfg).unwrap();
        assert_eq!(table.rows.len(), 21);
        assert_eq!(table.rows[0][1], -1.0);
        table.check().unwrap();
    }
}
