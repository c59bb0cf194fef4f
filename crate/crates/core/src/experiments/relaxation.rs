use super::{par_map, ExperimentConfig, OracleHealth, ResultTable};
use crate::analytic::{dispersive, relaxation_summary};
use crate::error::Result;
use crate::model::{validate, Column, QubitSector, SystemParams};
use crate::oracle::{ensemble_initial_state, evolve, fit_exponential, steady_state};

/// Drive regimes of the stationary qubit state. Stored in tables via
/// [`Regime::code`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NoDrive,
    /// Drive within κ/2 of the resonance pulled by the given sector.
    Resonant(QubitSector),
    FarDetuned,
    Intermediate,
}

impl Regime {
    /// 0 no drive, 1 resonant, 2 far detuned, 3 intermediate.
    pub fn code(self) -> f64 {
        match self {
            Regime::NoDrive => 0.0,
            Regime::Resonant(_) => 1.0,
            Regime::FarDetuned => 2.0,
            Regime::Intermediate => 3.0,
        }
    }

    /// σ_z of the sector whose pulled resonance is driven, 0 otherwise.
    pub fn resonant_sigma_z(self) -> f64 {
        match self {
            Regime::Resonant(s) => s.sigma_z(),
            _ => 0.0,
        }
    }
}

pub fn classify_regime(params: &SystemParams) -> Result<Regime> {
    if params.epsilon == 0.0 {
        return Ok(Regime::NoDrive);
    }
    let d = dispersive(params)?;
    let half_width = 0.5 * params.kappa;
    for sector in [QubitSector::Excited, QubitSector::Ground] {
        if d.omega_tilde_dr(sector).abs() <= half_width {
            return Ok(Regime::Resonant(sector));
        }
    }
    if (params.omega_d - params.omega_r).abs() >= 10.0 * d.chi.abs() {
        return Ok(Regime::FarDetuned);
    }
    Ok(Regime::Intermediate)
}

/// Closed-form stationary value and rate against exponential fits of the
/// master-equation ⟨σ_z⟩(t), one row per sweep point.
pub fn run_relaxation_compare(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.check()?;
    let oracle = cfg.require_oracle()?;
    let points = cfg.points()?;
    let mut columns = Vec::new();
    if let Some(s) = &cfg.sweep {
        columns.push(s.parameter.as_str());
    }
    columns.extend([
        "sigma_st_analytic",
        "sigma_st_fitted",
        "sigma_st_abs_error",
        "gamma_analytic",
        "gamma_fitted",
        "gamma_rel_error",
        "fit_rms",
        "decay_times",
        "sigma_z_final",
    ]);
    let mut table = ResultTable::new(&columns, cfg);

    let runs = par_map(&points, |(_, p)| {
        let rho0 = ensemble_initial_state(p, oracle.hilbert, cfg.sigma_z0)?;
        let run = evolve(&rho0, &cfg.grid, p, &oracle)?;
        let fit = fit_exponential(&run.trajectory, Column::SigmaZ)?;
        Ok((run, fit))
    })?;

    let mut health = OracleHealth::default();
    for ((value, p), (run, fit)) in points.iter().zip(&runs) {
        table.add_warnings(validate(p)?);
        health.absorb(&run.diagnostics, &run.warnings);
        let s = relaxation_summary(p)?;
        table.add_warnings(s.warning());
        if fit.decay_times < 2.0 {
            table.add_warnings(vec![format!(
                "fit spans {:.2} decay times (< 2); lengthen the grid",
                fit.decay_times
            )]);
        }
        let mut row: Vec<f64> = value.iter().copied().collect();
        row.extend([
            s.sigma_st,
            fit.asymptote,
            (fit.asymptote - s.sigma_st).abs(),
            s.gamma,
            fit.rate,
            (fit.rate - s.gamma) / s.gamma,
            fit.rms,
            fit.decay_times,
            run.trajectory.last_sigma_z().expect("grid has samples"),
        ]);
        table.push_row(row)?;
    }
    health.write_to(&mut table);
    Ok(table)
}

/// Closed-form stationary value across a sweep, with regime labels and, when
/// an oracle is configured, the exact steady state of the master equation.
pub fn run_stationary_compare(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.check()?;
    let points = cfg.points()?;
    let mut columns = Vec::new();
    if let Some(s) = &cfg.sweep {
        columns.push(s.parameter.as_str());
    }
    columns.extend([
        "sigma_st",
        "phi_plus",
        "phi_minus",
        "gamma",
        "regime",
        "resonant_sigma_z",
        "in_range",
    ]);
    if cfg.oracle.is_some() {
        columns.extend(["sigma_z_oracle", "photon_number_oracle"]);
    }
    let mut table = ResultTable::new(&columns, cfg);

    let steady = match cfg.oracle {
        None => None,
        Some(oracle) => Some(par_map(&points, |(_, p)| steady_state(p, &oracle))?),
    };
    let mut health = OracleHealth::default();
    for (k, (value, p)) in points.iter().enumerate() {
        table.add_warnings(validate(p)?);
        let s = relaxation_summary(p)?;
        table.add_warnings(s.warning());
        let regime = classify_regime(p)?;
        let mut row: Vec<f64> = value.iter().copied().collect();
        row.extend([
            s.sigma_st,
            s.phi_plus,
            s.phi_minus,
            s.gamma,
            regime.code(),
            regime.resonant_sigma_z(),
            f64::from(u8::from(s.warning().is_none())),
        ]);
        if let Some(states) = &steady {
            let rho = &states[k];
            health.absorb(&rho.diagnostics(), &[]);
            row.extend([rho.sigma_z(), rho.photon_number()]);
        }
        table.push_row(row)?;
    }
    health.write_to(&mut table);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::sigma_stationary_bath;
    use crate::experiments::{ExperimentKind, Sweep};
    use crate::model::TimeGrid;
    use crate::oracle::{HilbertSpec, OracleConfig};

    fn suite() -> SystemParams {
        SystemParams {
            omega_q: 5400.0,
            omega_r: 5000.0,
            omega_d: 5001.0,
            g: 20.0,
            kappa: 1.0,
            epsilon: std::f64::consts::FRAC_1_SQRT_2,
            n_th: 0.2,
            temperature_ratio: None,
        }
    }

    fn stationary(p: SystemParams, sweep: Sweep) -> ExperimentConfig {
        ExperimentConfig::new(ExperimentKind::StationaryCompare, p, TimeGrid::new(0.0, 1.0, 1).unwrap())
            .with_sweep(sweep)
    }

    #[test]
    fn regimes() {
        let p = suite();
        assert_eq!(classify_regime(&p).unwrap(), Regime::Resonant(QubitSector::Excited));
        let g = SystemParams { omega_d: 4999.2, ..p };
        assert_eq!(classify_regime(&g).unwrap(), Regime::Resonant(QubitSector::Ground));
        let off = SystemParams { omega_d: 5010.0, ..p };
        assert_eq!(classify_regime(&off).unwrap(), Regime::FarDetuned);
        let mid = SystemParams { omega_d: 5003.0, ..p };
        assert_eq!(classify_regime(&mid).unwrap(), Regime::Intermediate);
        let none = SystemParams { epsilon: 0.0, ..p };
        assert_eq!(classify_regime(&none).unwrap(), Regime::NoDrive);
    }

    #[test]
    fn undriven_row_is_the_bath_value() {
        let t = run_stationary_compare(&stationary(suite(), Sweep::new("epsilon", vec![0.0, 0.5]))).unwrap();
        let s = t.column("sigma_st").unwrap();
        assert_eq!(s[0], sigma_stationary_bath(0.2));
        assert_eq!(t.column("regime").unwrap()[0], 0.0);
    }

    #[test]
    fn far_detuned_strong_drive_goes_to_zero() {
        let p = SystemParams { omega_d: 5200.0, ..suite() };
        let eps = vec![5.0, 20.0, 80.0, 320.0, 1280.0];
        let t = run_stationary_compare(&stationary(p, Sweep::new("epsilon", eps))).unwrap();
        let s = t.column("sigma_st").unwrap();
        assert!(s.windows(2).all(|w| w[1].abs() < w[0].abs()));
        assert!(s[4].abs() < 0.01);
        assert!(t.column("regime").unwrap().iter().all(|&r| r == 2.0));
    }

    #[test]
    fn resonant_drive_approaches_the_poles() {
        let base = SystemParams { kappa: 0.1, ..suite() };
        let eps = vec![0.1, 1.0, 5.0, 20.0];
        // drive on the excited-pulled resonance pushes towards ground
        let t = run_stationary_compare(&stationary(base, Sweep::new("epsilon", eps.clone()))).unwrap();
        let s = t.column("sigma_st").unwrap();
        assert!(s.windows(2).all(|w| w[1] > w[0]));
        assert!(s[3] > 0.95);
        // drive on the ground-pulled resonance pushes towards excited
        let ground = SystemParams { omega_d: 4999.0, ..base };
        let t = run_stationary_compare(&stationary(ground, Sweep::new("epsilon", eps))).unwrap();
        let s = t.column("sigma_st").unwrap();
        assert!(s.windows(2).all(|w| w[1] < w[0]));
        assert!(s[3] < -0.95, "{s:?}");
    }

    #[test]
    fn relaxation_compare_needs_oracle() {
        let cfg = ExperimentConfig::new(ExperimentKind::RelaxationCompare, suite(), TimeGrid::new(0.0, 1.0, 10).unwrap());
        assert!(run_relaxation_compare(&cfg).is_err());
    }

    #[test]
    fn small_relaxation_compare() {
        // strongly coupled toy system that relaxes within a few time units
        let p = SystemParams {
            omega_q: 7.0,
            omega_r: 5.0,
            omega_d: 5.0,
            g: 0.3,
            kappa: 1.0,
            epsilon: 0.0,
            n_th: 0.1,
            temperature_ratio: None,
        };
        let oracle = OracleConfig {
            hilbert: HilbertSpec::new(6).unwrap(),
            ..OracleConfig::default()
        };
        let cfg = ExperimentConfig::new(ExperimentKind::RelaxationCompare, p, TimeGrid::new(0.0, 200.0, 100).unwrap())
            .with_oracle(oracle);
        let t = run_relaxation_compare(&cfg).unwrap();
        let fitted = t.column("sigma_st_fitted").unwrap()[0];
        assert!((fitted - sigma_stationary_bath(0.1)).abs() < 0.05, "{fitted}");
        let err = t.column("gamma_rel_error").unwrap()[0];
        assert!(err.abs() < 0.15, "{err}");
        assert!(t.summary_value("max_trace_error").unwrap() < 1e-8);
    }
}
