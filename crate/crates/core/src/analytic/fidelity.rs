//! Single-shot measurement fidelity and the minimum measurement time.

use super::rate::{integrate_sigma_z, rate_step_limit, RateVariant};
use super::photon_number;
use crate::error::{Error, Result};
use crate::model::{QubitSector, SystemParams, TimeGrid, Warning};

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTau(tau))
    }
}

/// F(τ) = 1 − g²(n_r^b + 1)/ω_qr² · (1 − sin(ω_qr τ)/(ω_qr τ)), with n_r^b
/// evaluated for the post-collapse excited state.
pub fn fidelity_curve(tau: f64, params: &SystemParams) -> Result<f64> {
    check_tau(tau)?;
    let w = params.omega_qr();
    let x = w * tau;
    let n = photon_number(params, QubitSector::Excited, false);
    let sinc = x.sin() / x;
    Ok(1.0 - params.g * params.g * (n + 1.0) / (w * w) * (1.0 - sinc))
}

/// The closed form is derived for τ < 2/κ; beyond that it is still evaluated
/// but flagged.
pub fn fidelity_window_warning(tau: f64, params: &SystemParams) -> Option<Warning> {
    let limit = 2.0 / params.kappa;
    (tau >= limit).then_some(Warning::FidelityWindow { tau, limit })
}

/// Long-measurement limit 1 − g²(n_r^b + 1)/ω_qr².
pub fn fidelity_asymptotic(params: &SystemParams) -> f64 {
    let w = params.omega_qr();
    let n = photon_number(params, QubitSector::Excited, false);
    1.0 - params.g * params.g * (n + 1.0) / (w * w)
}

/// (1/τ) ∫₀^τ √((1 − σ_z(t))/2) dt over the rate-equation solution started in
/// the excited state, by the trapezoidal rule on the integration grid.
pub fn fidelity_numeric(tau: f64, params: &SystemParams, variant: RateVariant) -> Result<f64> {
    check_tau(tau)?;
    // half the guard keeps quadrature error far below the closed-form terms
    let grid = TimeGrid::with_max_step(0.0, tau, 0.5 * rate_step_limit(params))?;
    let traj = integrate_sigma_z(-1.0, &grid, params, variant)?;
    Ok(trapezoid_mean(&traj.times, &traj.sigma_z, beta_amplitude))
}

/// |β| recovered from σ_z = |α|² − |β|².
pub(crate) fn beta_amplitude(sigma_z: f64) -> f64 {
    (0.5 * (1.0 - sigma_z)).max(0.0).sqrt()
}

/// Time average of `f(values)` over `times` by the trapezoidal rule.
pub(crate) fn trapezoid_mean(times: &[f64], values: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let span = times[times.len() - 1] - times[0];
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (f(v[0]) + f(v[1])))
        .sum();
    integral / span
}

/// Smallest τ compatible with fidelity `f_target`: (n_rb + 1)/(2(1 − F)|ω_qr|).
pub fn min_measurement_time(f_target: f64, n_rb: f64, omega_qr: f64) -> Result<f64> {
    if !(f_target > 0.0 && f_target < 1.0) {
        return Err(Error::FidelityOutOfRange(f_target));
    }
    if omega_qr == 0.0 {
        return Err(Error::ZeroDetuning { omega: omega_qr });
    }
    Ok((n_rb + 1.0) / (2.0 * (1.0 - f_target) * omega_qr.abs()))
}
