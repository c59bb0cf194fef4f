//! Ensemble relaxation of ⟨σ_z⟩ towards its drive-controlled stationary value.

use super::{
    dispersive_unchecked, drive_lorentzian, interpolate, photon_number, steady_field_amplitude,
};
use crate::error::{Error, Result};
use crate::model::{QubitSector, SystemParams, TimeGrid, Trajectory, Warning};

/// Stationary value and relaxation rate of the ensemble rate equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationSummary {
    pub sigma_st: f64,
    pub gamma: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
}

impl RelaxationSummary {
    /// Red-detuned strong drive can push φ below ½ and σ_st out of range.
    pub fn warning(&self) -> Option<Warning> {
        (!(-1.0..=1.0).contains(&self.sigma_st)).then_some(Warning::StationaryOutOfRange {
            sigma_st: self.sigma_st,
        })
    }

    /// ⟨σ_z(t)⟩ = σ_st + (σ_z0 − σ_st) e^{−γt}.
    pub fn evaluate(&self, sigma_z0: f64, t: f64) -> f64 {
        self.sigma_st + (sigma_z0 - self.sigma_st) * (-self.gamma * t).exp()
    }
}

/// σ_st = 1/(1 + 2 n_th) for a bath without drive.
pub fn sigma_stationary_bath(n_th: f64) -> f64 {
    1.0 / (1.0 + 2.0 * n_th)
}

/// φ(σ_z) = n_r^b + ½ + (2ω̃_dr/κ) ε²/(ω̃_dr² + κ²/4).
pub fn phi(sector: QubitSector, params: &SystemParams) -> f64 {
    let w = dispersive_unchecked(params).omega_tilde_dr(sector);
    photon_number(params, sector, false)
        + 0.5
        + 2.0 * w / params.kappa * drive_lorentzian(params, w)
}

pub fn relaxation_summary(params: &SystemParams) -> Result<RelaxationSummary> {
    let phi_plus = phi(QubitSector::Ground, params);
    let phi_minus = phi(QubitSector::Excited, params);
    let total = phi_plus + phi_minus;
    if total == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let w = params.omega_qr();
    Ok(RelaxationSummary {
        sigma_st: (phi_minus - phi_plus + 1.0) / total,
        gamma: params.kappa * params.g * params.g * total / (w * w),
        phi_plus,
        phi_minus,
    })
}

/// Right-hand side of the linear ensemble rate equation for ⟨σ_z⟩.
pub fn ensemble_rate(sigma_z: f64, params: &SystemParams) -> f64 {
    let phi_plus = phi(QubitSector::Ground, params);
    let phi_minus = phi(QubitSector::Excited, params);
    let w = params.omega_qr();
    params.kappa * params.g * params.g / (w * w)
        * (-sigma_z * (phi_plus + phi_minus) + phi_minus - phi_plus + 1.0)
}

/// Exponential solution of the ensemble rate equation sampled on `grid`.
pub fn ensemble_relaxation(
    sigma_z0: f64,
    grid: &TimeGrid,
    params: &SystemParams,
) -> Result<Trajectory> {
    grid.check()?;
    if !(sigma_z0.abs() <= 1.0) {
        return Err(Error::SigmaOutOfRange(sigma_z0));
    }
    let summary = relaxation_summary(params)?;
    let n_plus = photon_number(params, QubitSector::Ground, false);
    let n_minus = photon_number(params, QubitSector::Excited, false);
    let a_plus = steady_field_amplitude(params, QubitSector::Ground);
    let a_minus = steady_field_amplitude(params, QubitSector::Excited);
    let mut traj = Trajectory::with_capacity(grid.len());
    for t in grid.times() {
        let s = summary.evaluate(sigma_z0, t - grid.t_start);
        traj.push(
            t,
            s,
            interpolate(s, n_plus, n_minus),
            interpolate(s, a_plus.re, a_minus.re),
            interpolate(s, a_plus.im, a_minus.im),
        );
    }
    Ok(traj)
}
