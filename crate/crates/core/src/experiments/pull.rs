use super::{par_map, quadratic_peak, ExperimentConfig, OracleHealth, ResultTable};
use crate::analytic::{dispersive, photon_number};
use crate::error::Result;
use crate::model::{validate, QubitSector};
use crate::oracle::{sector_photon_number, SectorPhotons};

/// Resonator response versus drive frequency for each qubit sector.
///
/// Summary: closed-form and (with an oracle) simulated peak positions per
/// sector, the positions ω_r − χσ_z they should sit at, peak-height ratios,
/// and `separable` = 1 when χ > κ/2.
pub fn run_photon_pull_sweep(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.check()?;
    let sweep = cfg.require_sweep("omega_d")?;
    let points = cfg.points()?;
    let d = dispersive(&cfg.base)?;

    let mut columns = vec!["omega_d", "n_analytic_ground", "n_analytic_excited"];
    if cfg.oracle.is_some() {
        columns.extend([
            "n_oracle_ground",
            "n_oracle_excited",
            "population_ground",
            "population_excited",
        ]);
    }
    let mut table = ResultTable::new(&columns, cfg);
    table.add_warnings(validate(&cfg.base)?);

    let analytic: Vec<[f64; 2]> = points
        .iter()
        .map(|(_, p)| QubitSector::BOTH.map(|s| photon_number(p, s, false)))
        .collect();

    let oracle_rows: Option<Vec<[SectorPhotons; 2]>> = match cfg.oracle {
        None => None,
        Some(oracle) => {
            let jobs: Vec<_> = points
                .iter()
                .flat_map(|(_, p)| QubitSector::BOTH.map(|s| (*p, s)))
                .collect();
            let runs = par_map(&jobs, |(p, s)| sector_photon_number(p, &oracle, *s, cfg.settle_time))?;
            let mut health = OracleHealth::default();
            for r in &runs {
                health.absorb(&r.diagnostics, &r.warnings);
            }
            health.write_to(&mut table);
            let mut it = runs.into_iter();
            Some(
                (0..points.len())
                    .map(|_| [it.next().expect("ground run"), it.next().expect("excited run")])
                    .collect(),
            )
        }
    };

    for (k, &w) in sweep.values.iter().enumerate() {
        let mut row = vec![w, analytic[k][0], analytic[k][1]];
        if let Some(o) = &oracle_rows {
            row.extend([
                o[k][0].photon_number,
                o[k][1].photon_number,
                o[k][0].sector_population,
                o[k][1].sector_population,
            ]);
        }
        table.push_row(row)?;
    }

    table.set_summary("chi", d.chi);
    table.set_summary("kappa", cfg.base.kappa);
    table.set_summary("separable", f64::from(u8::from(d.chi.abs() > 0.5 * cfg.base.kappa)));
    for (i, sector) in QubitSector::BOTH.into_iter().enumerate() {
        let label = sector.label();
        let analytic_col: Vec<f64> = analytic.iter().map(|a| a[i]).collect();
        table.set_summary(
            &format!("expected_peak_{label}"),
            d.pulled_resonance(cfg.base.omega_r, sector),
        );
        let (x, y) = quadratic_peak(&sweep.values, &analytic_col).expect("non-empty sweep");
        table.set_summary(&format!("analytic_peak_{label}"), x);
        table.set_summary(&format!("analytic_peak_height_{label}"), y);
        if let Some(o) = &oracle_rows {
            let oracle_col: Vec<f64> = o.iter().map(|r| r[i].photon_number).collect();
            let (xo, yo) = quadratic_peak(&sweep.values, &oracle_col).expect("non-empty sweep");
            table.set_summary(&format!("oracle_peak_{label}"), xo);
            table.set_summary(&format!("oracle_peak_height_{label}"), yo);
            let worst = oracle_col
                .iter()
                .zip(&analytic_col)
                .map(|(o, a)| ((o - a) / a).abs())
                .fold(0.0, f64::max);
            table.set_summary(&format!("max_relative_error_{label}"), worst);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{ExperimentKind, Sweep};
    use crate::model::{SystemParams, TimeGrid};

    fn cfg(chi_over_kappa: f64) -> ExperimentConfig {
        // χ = g²/ω_qr = 1
        let p = SystemParams {
            omega_q: 5100.0,
            omega_r: 5000.0,
            omega_d: 5000.0,
            g: 10.0,
            kappa: 1.0 / chi_over_kappa,
            epsilon: 0.05,
            n_th: 0.0,
            temperature_ratio: None,
        };
        ExperimentConfig::new(ExperimentKind::PhotonPullSweep, p, TimeGrid::new(0.0, 1.0, 1).unwrap())
            .with_sweep(Sweep::linspace("omega_d", 4997.0, 5003.0, 61))
    }

    #[test]
    fn separable_verdict() {
        let t = run_photon_pull_sweep(&cfg(10.0)).unwrap();
        assert_eq!(t.summary_value("separable"), Some(1.0));
        let t = run_photon_pull_sweep(&cfg(0.25)).unwrap();
        assert_eq!(t.summary_value("separable"), Some(0.0));
    }

    #[test]
    fn analytic_peaks_at_pulled_frequencies() {
        let t = run_photon_pull_sweep(&cfg(10.0)).unwrap();
        let step = 0.1;
        let g = t.summary_value("analytic_peak_ground").unwrap();
        let e = t.summary_value("analytic_peak_excited").unwrap();
        assert!((g - 4999.0).abs() <= step);
        assert!((e - 5001.0).abs() <= step);
        assert_eq!(t.columns.len(), 3);
        t.check().unwrap();
    }

    #[test]
    fn requires_omega_d_sweep() {
        let mut c = cfg(1.0);
        c.sweep = Some(Sweep::new("epsilon", vec![0.1]));
        assert!(run_photon_pull_sweep(&c).is_err());
    }
}
