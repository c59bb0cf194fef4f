use super::{analytic_substeps, local_extrema, log_linear_rate, ExperimentConfig, ResultTable};
use crate::analytic::{integrate_sigma_z_sampled, photon_number, RateVariant};
use crate::error::Result;
use crate::model::{validate, QubitSector};

/// Constant C of the full-versus-reduced divergence bound.
pub const DIVERGENCE_CONSTANT: f64 = 10.0;

/// Both rate equations from `cfg.sigma_z0`, side by side.
///
/// Summary: the full-variant oscillation period from its first two maxima,
/// the envelope decay rate from successive extrema within 4/κ, and the
/// largest full-reduced difference there next to its bound
/// C · 4g²/ω_qr² · (n + 1).
pub fn run_rate_equation_demo(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.check()?;
    let p = cfg.base;
    let mut table = ResultTable::new(&["t", "sigma_z_full", "sigma_z_reduced", "difference"], cfg);
    table.add_warnings(validate(&p)?);
    let substeps = analytic_substeps(&cfg.grid, &p);
    let full = integrate_sigma_z_sampled(cfg.sigma_z0, &cfg.grid, &p, RateVariant::Full, substeps)?;
    let reduced = integrate_sigma_z_sampled(cfg.sigma_z0, &cfg.grid, &p, RateVariant::Reduced, substeps)?;

    let window = cfg.grid.t_start + 4.0 / p.kappa;
    let mut divergence = 0.0f64;
    for k in 0..full.len() {
        let diff = full.sigma_z[k] - reduced.sigma_z[k];
        if full.times[k] <= window {
            divergence = divergence.max(diff.abs());
        }
        table.push_row(vec![full.times[k], full.sigma_z[k], reduced.sigma_z[k], diff])?;
    }

    let sector = if cfg.sigma_z0 <= 0.0 {
        QubitSector::Excited
    } else {
        QubitSector::Ground
    };
    let n = photon_number(&p, sector, false);
    let w = p.omega_qr();
    table.set_summary("max_divergence", divergence);
    table.set_summary(
        "divergence_bound",
        DIVERGENCE_CONSTANT * 4.0 * p.g * p.g / (w * w) * (n + 1.0),
    );
    table.set_summary("expected_period", 2.0 * std::f64::consts::PI / w.abs());
    table.set_summary("expected_envelope_rate", 0.5 * p.kappa);

    let extrema = local_extrema(&full.times, &full.sigma_z);
    let maxima: Vec<f64> = extrema.iter().filter(|e| e.is_max).map(|e| e.t).collect();
    if maxima.len() >= 2 {
        table.set_summary("period", maxima[1] - maxima[0]);
    } else {
        table.add_warnings(vec!["fewer than two maxima resolved; no period".to_string()]);
    }
    let in_window: Vec<_> = extrema.iter().filter(|e| e.t <= window).collect();
    let amplitudes: Vec<f64> = in_window.windows(2).map(|e| (e[1].value - e[0].value).abs()).collect();
    let mids: Vec<f64> = in_window.windows(2).map(|e| 0.5 * (e[0].t + e[1].t)).collect();
    match log_linear_rate(&mids, &amplitudes) {
        Some(rate) => table.set_summary("envelope_rate", rate),
        None => table.add_warnings(vec!["too few extrema for an envelope fit".to_string()]),
    }
    Ok(table)
}
