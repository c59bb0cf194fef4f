//! Brute-force master-equation reference for the closed-form results.
//!
//! The qubit, the resonator truncated to `n_fock` levels and a classical drive
//! evolve under a Lindblad equation whose only dissipators act on the
//! resonator (photon loss and thermal absorption at rate κ, occupancy n_th).

mod evolve;
mod fit;
mod hamiltonian;
mod lindblad;
mod operators;
mod sparse;
mod state;
mod steady;

pub use evolve::{
    evolve, evolve_observed, max_frequency, step_limit, Evolution, STEP_RESOLUTION,
    TRUNCATION_LIMIT,
};
pub use fit::{fit_exponential, fit_exponential_series, ExponentialFit, MAX_FIT_ITERATIONS};
pub use hamiltonian::{build_hamiltonian, Hamiltonian, LabDrive};
pub use lindblad::lindblad_rhs;
pub use operators::{
    build_operators, hermiticity_error, CMatrix, HilbertSpec, Operators, DEFAULT_N_FOCK,
};
pub use state::{displaced_thermal_state, thermal_state, DensityMatrix, StateDiagnostics};
pub use steady::steady_state;

use serde::{Deserialize, Serialize};

use crate::analytic::{beta_amplitude, steady_field_amplitude, trapezoid_mean};
use crate::error::{Error, Result};
use crate::model::{QubitSector, SystemParams, TimeGrid, Warning};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    /// Rotating at the drive frequency.
    #[default]
    Rotating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// g(σ₊ − σ₋)(a† − a)
    Full,
    /// g(σ₊a† + σ₋a)
    #[default]
    Rwa,
}

/// How the RK4 steps are carried out. `Propagator` multiplies the vectorized
/// state by the precomputed RK4 update raised to the number of substeps;
/// `Auto` picks whichever is estimated cheaper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Propagation {
    #[default]
    Auto,
    Stepping,
    Propagator,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OracleConfig {
    pub frame: Frame,
    pub coupling: Coupling,
    /// Upper bound on the RK4 step; derived from the resolution guard if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub hilbert: HilbertSpec,
    #[serde(default)]
    pub propagation: Propagation,
}

impl OracleConfig {
    pub fn check(&self) -> Result<()> {
        self.hilbert.check()?;
        if self.frame == Frame::Rotating && self.coupling == Coupling::Full {
            return Err(Error::UnsupportedCombination(
                "counter-rotating coupling is time dependent in the rotating frame".into(),
            ));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::NonPositiveRate {
                    field: "dt",
                    value: dt,
                });
            }
        }
        Ok(())
    }
}

/// Resonator steady state with the qubit frozen in `sector`: displaced
/// thermal state at the closed-form field amplitude.
pub fn frozen_resonator_state(params: &SystemParams, n_fock: usize, sector: QubitSector) -> CMatrix {
    displaced_thermal_state(n_fock, steady_field_amplitude(params, sector), params.n_th)
}

/// Diagonal qubit mixture with ⟨σ_z⟩ = σ_z0, each sector dressed with its
/// frozen resonator state.
pub fn ensemble_initial_state(
    params: &SystemParams,
    spec: HilbertSpec,
    sigma_z0: f64,
) -> Result<DensityMatrix> {
    DensityMatrix::ensemble(
        spec,
        sigma_z0,
        &frozen_resonator_state(params, spec.n_fock, QubitSector::Ground),
        &frozen_resonator_state(params, spec.n_fock, QubitSector::Excited),
    )
}

/// Fidelity together with the run's health numbers.
#[derive(Debug, Clone)]
pub struct FidelityRun {
    pub fidelity: f64,
    pub diagnostics: StateDiagnostics,
    pub warnings: Vec<Warning>,
}

/// Samples per fastest σ_z oscillation period / 2π used for the quadrature.
const FIDELITY_SAMPLE_RESOLUTION: f64 = 0.1;

pub fn fidelity_oracle_run(tau: f64, params: &SystemParams, config: &OracleConfig) -> Result<FidelityRun> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::NonPositiveTau(tau));
    }
    let w = params.omega_qr().abs().max(params.kappa);
    let grid = TimeGrid::with_max_step(0.0, tau, FIDELITY_SAMPLE_RESOLUTION / w)?;
    let grid = if grid.n_steps < 20 {
        TimeGrid::new(0.0, tau, 20)?
    } else {
        grid
    };
    let rho0 = ensemble_initial_state(params, config.hilbert, -1.0)?;
    let run = evolve(&rho0, &grid, params, config)?;
    let fidelity = trapezoid_mean(&run.trajectory.times, &run.trajectory.sigma_z, beta_amplitude);
    Ok(FidelityRun {
        fidelity,
        diagnostics: run.diagnostics,
        warnings: run.warnings,
    })
}

/// (1/τ) ∫₀^τ √((1 − ⟨σ_z⟩)/2) dt over a master-equation run started in the
/// excited state.
pub fn fidelity_oracle(tau: f64, params: &SystemParams, config: &OracleConfig) -> Result<f64> {
    fidelity_oracle_run(tau, params, config).map(|r| r.fidelity)
}

#[derive(Debug, Clone)]
pub struct SectorPhotons {
    pub photon_number: f64,
    /// Probability left in the prepared sector at the end of the run.
    pub sector_population: f64,
    pub diagnostics: StateDiagnostics,
    pub warnings: Vec<Warning>,
}

/// Resonator photon number conditioned on the qubit sector after the field
/// has settled for `settle_time`, starting from the frozen-qubit state.
pub fn sector_photon_number(
    params: &SystemParams,
    config: &OracleConfig,
    sector: QubitSector,
    settle_time: f64,
) -> Result<SectorPhotons> {
    let spec = config.hilbert;
    let rho0 = DensityMatrix::product(spec, sector, &frozen_resonator_state(params, spec.n_fock, sector))?;
    let grid = TimeGrid::new(0.0, settle_time, 8)?;
    let run = evolve(&rho0, &grid, params, config)?;
    Ok(SectorPhotons {
        photon_number: run.final_state.sector_photon_number(sector),
        sector_population: run.final_state.sector_population(sector),
        diagnostics: run.diagnostics,
        warnings: run.warnings,
    })
}
