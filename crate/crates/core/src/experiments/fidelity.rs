use super::{par_map, ExperimentConfig, OracleHealth, ResultTable};
use crate::analytic::{
    fidelity_asymptotic, fidelity_curve, fidelity_numeric, fidelity_window_warning,
    min_measurement_time, photon_number,
};
use crate::error::Result;
use crate::model::{validate, QubitSector};
use crate::oracle::fidelity_oracle_run;

/// Fidelity against measurement time.
///
/// `bound_applies` is 1 when τ ≥ 1/(2χ); `bound_holds` is 1 when
/// 1 − F_closed ≥ (n + 1)/(2τ|ω_qr|) there (always 1 where it does not apply).
pub fn run_fidelity_vs_tau(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.check()?;
    let taus = &cfg.require_sweep("tau")?.values;
    let p = cfg.base;
    let mut columns = vec!["tau", "f_closed", "f_quadrature"];
    if cfg.oracle.is_some() {
        columns.push("f_oracle");
    }
    columns.extend(["f_asymptotic", "tau_min", "bound_applies", "bound_holds"]);
    let mut table = ResultTable::new(&columns, cfg);
    table.add_warnings(validate(&p)?);

    let n = photon_number(&p, QubitSector::Excited, false);
    let w = p.omega_qr();
    let asymptote = fidelity_asymptotic(&p);
    let quadrature = par_map(taus, |&tau| fidelity_numeric(tau, &p, cfg.variant))?;
    let oracle = match cfg.oracle {
        None => None,
        Some(oracle) => {
            let runs = par_map(taus, |&tau| fidelity_oracle_run(tau, &p, &oracle))?;
            let mut health = OracleHealth::default();
            for r in &runs {
                health.absorb(&r.diagnostics, &r.warnings);
            }
            health.write_to(&mut table);
            Some(runs.into_iter().map(|r| r.fidelity).collect::<Vec<_>>())
        }
    };

    for (k, &tau) in taus.iter().enumerate() {
        let closed = fidelity_curve(tau, &p)?;
        table.add_warnings(fidelity_window_warning(tau, &p));
        let mut row = vec![tau, closed, quadrature[k]];
        if let Some(o) = &oracle {
            row.push(o[k]);
        }
        let tau_min = if closed < 1.0 {
            min_measurement_time(closed, n, w)?
        } else {
            0.0
        };
        let applies = tau >= 1.0 / (2.0 * p.chi().abs());
        let holds = !applies || 1.0 - closed >= (n + 1.0) / (2.0 * tau * w.abs());
        row.extend([asymptote, tau_min, f64::from(u8::from(applies)), f64::from(u8::from(holds))]);
        table.push_row(row)?;
    }
    table.set_summary("f_asymptotic", asymptote);
    table.set_summary("n_excited", n);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{ExperimentKind, Sweep};
    use crate::model::{SystemParams, TimeGrid};

    fn cfg(taus: Vec<f64>) -> ExperimentConfig {
        let p = SystemParams {
            omega_q: 5400.0,
            omega_r: 5000.0,
            omega_d: 5000.0,
            g: 20.0,
            kappa: 1.0,
            epsilon: std::f64::consts::FRAC_1_SQRT_2,
            n_th: 0.2,
            temperature_ratio: None,
        };
        ExperimentConfig::new(ExperimentKind::FidelityVsTau, p, TimeGrid::new(0.0, 1.0, 1).unwrap())
            .with_sweep(Sweep::new("tau", taus))
    }

    #[test]
    fn smallest_tau_has_highest_closed_fidelity() {
        // ω_qr τ = 2 for the first row, inside the first sinc lobe
        let t = run_fidelity_vs_tau(&cfg(vec![0.005, 0.05, 0.2, 0.5, 1.0])).unwrap();
        let f = t.column("f_closed").unwrap();
        assert!(f.iter().skip(1).all(|&x| x < f[0]));
        t.check().unwrap();
    }

    #[test]
    fn closed_form_approaches_asymptote() {
        let taus: Vec<f64> = [0.05, 0.5, 1.5].to_vec();
        let t = run_fidelity_vs_tau(&cfg(taus.clone())).unwrap();
        let f = t.column("f_closed").unwrap();
        let a = t.summary_value("f_asymptotic").unwrap();
        for (tau, f) in taus.iter().zip(f) {
            assert!((f - a).abs() <= 1.0 / (400.0 * tau));
        }
    }

    #[test]
    fn time_bound_flagged_past_inverse_two_chi() {
        // 1/(2χ) = 0.5
        let t = run_fidelity_vs_tau(&cfg(vec![0.1, 0.6, 1.0, 1.9])).unwrap();
        let applies = t.column("bound_applies").unwrap();
        let holds = t.column("bound_holds").unwrap();
        assert_eq!(applies, vec![0.0, 1.0, 1.0, 1.0]);
        assert!(holds.iter().all(|&h| h == 1.0));
    }

    #[test]
    fn window_warning_attached() {
        let t = run_fidelity_vs_tau(&cfg(vec![0.5, 3.0])).unwrap();
        assert_eq!(t.warnings.len(), 1);
    }
}
