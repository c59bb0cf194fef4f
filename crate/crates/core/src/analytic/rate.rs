//! Single-shot rate equations for σ_z and their fixed-step integration.

use serde::{Deserialize, Serialize};

use super::{
    dispersive_unchecked, drive_lorentzian, interpolate, interpolate_weighted, photon_number,
    steady_field_amplitude,
};
use crate::error::{Error, Result};
use crate::model::{QubitSector, SystemParams, TimeGrid, Trajectory};

/// Which form of the single-shot rate equation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateVariant {
    /// All oscillating terms retained.
    Full,
    /// Oscillating terms proportional to κ and ω̃_dr dropped.
    #[default]
    Reduced,
}

/// Sector-resolved coefficients of the rate equations, precomputed once.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RateCoefficients {
    prefactor: f64,
    omega_qr: f64,
    kappa: f64,
    // n_r^b + 1/2 at σ_z = ±1
    thermal_plus: f64,
    thermal_minus: f64,
    // 2 ω̃_dr L at σ_z = ±1
    shift_plus: f64,
    shift_minus: f64,
    // κ L at σ_z = ±1
    damp_plus: f64,
    damp_minus: f64,
}

impl RateCoefficients {
    pub(crate) fn new(params: &SystemParams) -> Self {
        let d = dispersive_unchecked(params);
        let sector = |s: QubitSector| {
            let w = d.omega_tilde_dr(s);
            let l = drive_lorentzian(params, w);
            (
                photon_number(params, s, false) + 0.5,
                2.0 * w * l,
                params.kappa * l,
            )
        };
        let (thermal_plus, shift_plus, damp_plus) = sector(QubitSector::Ground);
        let (thermal_minus, shift_minus, damp_minus) = sector(QubitSector::Excited);
        RateCoefficients {
            prefactor: 2.0 * params.g * params.g / (d.omega_qr * d.omega_qr),
            omega_qr: d.omega_qr,
            kappa: params.kappa,
            thermal_plus,
            thermal_minus,
            shift_plus,
            shift_minus,
            damp_plus,
            damp_minus,
        }
    }

    pub(crate) fn rate(&self, variant: RateVariant, sigma_z: f64, t: f64) -> f64 {
        let decay = (-0.5 * self.kappa * t).exp();
        let (sin, cos) = (self.omega_qr * t).sin_cos();
        let bath =
            0.5 - interpolate_weighted(sigma_z, self.thermal_plus, self.thermal_minus);
        let shift = interpolate_weighted(sigma_z, self.shift_plus, self.shift_minus);
        let oscillating = 2.0 * self.omega_qr * sin * decay;
        let braces = match variant {
            RateVariant::Full => {
                let damp = interpolate_weighted(sigma_z, self.damp_plus, self.damp_minus);
                (oscillating + self.kappa * (1.0 - cos * decay)) * bath
                    - shift * (1.0 - cos * decay)
                    - damp * sin * decay
            }
            RateVariant::Reduced => (oscillating + self.kappa) * bath - shift,
        };
        self.prefactor * braces
    }
}

/// dσ_z/dt with every oscillating term kept.
pub fn sigma_z_rate_full(sigma_z: f64, t: f64, params: &SystemParams) -> f64 {
    RateCoefficients::new(params).rate(RateVariant::Full, sigma_z, t)
}

/// dσ_z/dt with the κ- and ω̃_dr-proportional oscillating terms dropped.
pub fn sigma_z_rate_reduced(sigma_z: f64, t: f64, params: &SystemParams) -> f64 {
    RateCoefficients::new(params).rate(RateVariant::Reduced, sigma_z, t)
}

pub fn sigma_z_rate(variant: RateVariant, sigma_z: f64, t: f64, params: &SystemParams) -> f64 {
    RateCoefficients::new(params).rate(variant, sigma_z, t)
}

/// Largest RK4 step accepted by [`integrate_sigma_z`]:
/// 0.1 / max(|ω_qr|, κ, |ω̃_dr(±1)|).
pub fn rate_step_limit(params: &SystemParams) -> f64 {
    let d = dispersive_unchecked(params);
    let fastest = QubitSector::BOTH
        .iter()
        .map(|s| d.omega_tilde_dr(*s).abs())
        .fold(d.omega_qr.abs().max(params.kappa), f64::max);
    0.1 / fastest
}

/// Classical RK4 solution of the chosen rate equation, one step per grid
/// interval.
///
/// The photon-number and field columns carry the sector coefficients
/// continued to the instantaneous σ_z.
pub fn integrate_sigma_z(
    sigma_z0: f64,
    grid: &TimeGrid,
    params: &SystemParams,
    variant: RateVariant,
) -> Result<Trajectory> {
    integrate_sigma_z_sampled(sigma_z0, grid, params, variant, 1)
}

/// Like [`integrate_sigma_z`] but takes `substeps` RK4 steps per grid
/// interval, so long runs need not store every step.
pub fn integrate_sigma_z_sampled(
    sigma_z0: f64,
    grid: &TimeGrid,
    params: &SystemParams,
    variant: RateVariant,
    substeps: usize,
) -> Result<Trajectory> {
    grid.check()?;
    crate::model::validate(params)?;
    if !(sigma_z0.abs() <= 1.0) {
        return Err(Error::SigmaOutOfRange(sigma_z0));
    }
    let substeps = substeps.max(1);
    let dt = grid.dt() / substeps as f64;
    let limit = rate_step_limit(params);
    // relative slack absorbs rounding in grids built from the limit itself
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, limit });
    }

    let coeffs = RateCoefficients::new(params);
    let n_plus = photon_number(params, QubitSector::Ground, false);
    let n_minus = photon_number(params, QubitSector::Excited, false);
    let a_plus = steady_field_amplitude(params, QubitSector::Ground);
    let a_minus = steady_field_amplitude(params, QubitSector::Excited);

    let mut traj = Trajectory::with_capacity(grid.len());
    let record = |traj: &mut Trajectory, t: f64, s: f64| {
        traj.push(
            t,
            s,
            interpolate(s, n_plus, n_minus),
            interpolate(s, a_plus.re, a_minus.re),
            interpolate(s, a_plus.im, a_minus.im),
        );
    };

    let f = |s: f64, t: f64| coeffs.rate(variant, s, t);
    let mut s = sigma_z0;
    record(&mut traj, grid.t_start, s);
    for k in 0..grid.n_steps {
        let t0 = grid.time(k);
        for j in 0..substeps {
            let t = t0 + j as f64 * dt;
            let k1 = f(s, t);
            let k2 = f(s + 0.5 * dt * k1, t + 0.5 * dt);
            let k3 = f(s + 0.5 * dt * k2, t + 0.5 * dt);
            let k4 = f(s + dt * k3, t + dt);
            s += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            s = s.clamp(-1.0, 1.0);
        }
        record(&mut traj, grid.time(k + 1), s);
    }
    Ok(traj)
}
