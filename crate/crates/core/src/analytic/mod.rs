//! Closed-form dispersive results as pure functions of [`SystemParams`].
//!
//! Coefficients that depend on the qubit state are known exactly at the two
//! eigenvalues σ_z = ±1. Between them they are continued linearly, with the
//! σ_z-weighted products continued as a unit:
//!
//! ```text
//! c(σ)   = ½[(1+σ) c⁺ + (1−σ) c⁻]
//! σ c(σ) = ½[(1+σ) c⁺ − (1−σ) c⁻]
//! ```
//!
//! With that pairing the non-oscillating part of the single-shot rate
//! equation is exactly the linear ensemble rate equation.

mod fidelity;
mod rate;
mod relaxation;

pub use fidelity::{
    fidelity_asymptotic, fidelity_curve, fidelity_numeric, fidelity_window_warning,
    min_measurement_time,
};
pub(crate) use fidelity::{beta_amplitude, trapezoid_mean};
pub use rate::{
    integrate_sigma_z, integrate_sigma_z_sampled, rate_step_limit, sigma_z_rate, sigma_z_rate_full, sigma_z_rate_reduced,
    RateVariant,
};
pub use relaxation::{
    ensemble_rate, ensemble_relaxation, phi, relaxation_summary, sigma_stationary_bath,
    RelaxationSummary,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{QubitSector, SystemParams};

/// χ, ω_qr and the qubit-dependent detunings ω̃_ir = ω_i − ω_r + χσ_z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersiveQuantities {
    pub chi: f64,
    pub omega_qr: f64,
    omega_dr: f64,
}

impl DispersiveQuantities {
    /// ω̃_dr(σ_z) = ω_d − ω_r + χσ_z.
    pub fn omega_tilde_dr(&self, sector: QubitSector) -> f64 {
        self.omega_dr + self.chi * sector.sigma_z()
    }

    /// ω̃_qr(σ_z) = ω_q − ω_r + χσ_z.
    pub fn omega_tilde_qr(&self, sector: QubitSector) -> f64 {
        self.omega_qr + self.chi * sector.sigma_z()
    }

    /// Drive frequency at which the resonator responds most strongly with the
    /// qubit in `sector`: ω_r − χσ_z.
    pub fn pulled_resonance(&self, omega_r: f64, sector: QubitSector) -> f64 {
        omega_r - self.chi * sector.sigma_z()
    }
}

pub fn dispersive(params: &SystemParams) -> Result<DispersiveQuantities> {
    let omega_qr = params.omega_qr();
    if omega_qr == 0.0 {
        return Err(Error::ZeroDetuning {
            omega: params.omega_q,
        });
    }
    Ok(DispersiveQuantities {
        chi: params.g * params.g / omega_qr,
        omega_qr,
        omega_dr: params.omega_d - params.omega_r,
    })
}

fn dispersive_unchecked(params: &SystemParams) -> DispersiveQuantities {
    let omega_qr = params.omega_qr();
    DispersiveQuantities {
        chi: params.g * params.g / omega_qr,
        omega_qr,
        omega_dr: params.omega_d - params.omega_r,
    }
}

/// Drive-Lorentzian ε² / (ω̃_dr² + κ²/4).
pub(crate) fn drive_lorentzian(params: &SystemParams, omega_tilde_dr: f64) -> f64 {
    params.epsilon * params.epsilon
        / (omega_tilde_dr * omega_tilde_dr + 0.25 * params.kappa * params.kappa)
}

/// Deterministic (drive) part of the steady resonator field,
/// i ε / (ω̃_dr + iκ/2), in the frame rotating at ω_d.
pub fn steady_field_amplitude(params: &SystemParams, sector: QubitSector) -> Complex64 {
    let d = dispersive_unchecked(params);
    let denom = Complex64::new(d.omega_tilde_dr(sector), 0.5 * params.kappa);
    Complex64::new(0.0, params.epsilon) / denom
}

/// Mean resonator photon number with the qubit in `sector`.
///
/// Drive photons plus thermal photons, and optionally the small photon
/// population delivered by the qubit itself.
pub fn photon_number(params: &SystemParams, sector: QubitSector, include_qubit_term: bool) -> f64 {
    let d = dispersive_unchecked(params);
    let mut n = drive_lorentzian(params, d.omega_tilde_dr(sector)) + params.n_th;
    if include_qubit_term {
        let w = d.omega_tilde_qr(sector);
        n += params.g * params.g * (1.0 - sector.sigma_z()) / (2.0 * w * w);
    }
    n
}

/// Linear continuation of a coefficient known at σ_z = ±1.
#[inline]
pub(crate) fn interpolate(sigma_z: f64, plus: f64, minus: f64) -> f64 {
    0.5 * ((1.0 + sigma_z) * plus + (1.0 - sigma_z) * minus)
}

/// Linear continuation of σ_z · c(σ_z) for c known at σ_z = ±1.
#[inline]
pub(crate) fn interpolate_weighted(sigma_z: f64, plus: f64, minus: f64) -> f64 {
    0.5 * ((1.0 + sigma_z) * plus - (1.0 - sigma_z) * minus)
}
