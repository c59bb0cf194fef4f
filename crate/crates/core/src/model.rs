//! Physical parameters, conventions and shared value types.
//!
//! Units: ħ = 1. Every frequency and rate is angular and expressed in one
//! arbitrary consistent unit. The qubit label convention is σ_z = +1 for the
//! ground state and σ_z = −1 for the excited state.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Advisory bound on |g / ω_qr|.
pub const MAX_COUPLING_RATIO: f64 = 0.2;
/// Advisory bound on κ / |ω_qr|.
pub const MAX_DAMPING_RATIO: f64 = 0.1;
/// Advisory bound on |ω_qr| / ω_r.
pub const MAX_DETUNING_RATIO: f64 = 0.2;

/// Tolerance used when `n_th` and `temperature_ratio` are both supplied.
pub const OCCUPANCY_CONSISTENCY_TOL: f64 = 1e-9;

/// Parameters of the driven qubit-resonator system after the bath has been
/// reduced to a Markovian dissipator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Qubit transition frequency.
    pub omega_q: f64,
    /// Bare resonator frequency.
    pub omega_r: f64,
    /// Drive frequency.
    pub omega_d: f64,
    /// Qubit-resonator coupling as a frequency.
    pub g: f64,
    /// Resonator energy decay rate.
    pub kappa: f64,
    /// Drive amplitude |f_0 c| as a frequency (phase fixed to zero).
    pub epsilon: f64,
    /// Thermal occupancy of the bath at the resonator frequency.
    pub n_th: f64,
    /// Optional ħω_r / (k_B T); when set, `n_th` must agree with it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_ratio: Option<f64>,
}

impl SystemParams {
    /// ω_qr = ω_q − ω_r.
    pub fn omega_qr(&self) -> f64 {
        self.omega_q - self.omega_r
    }

    /// Dispersive shift χ = g² / ω_qr.
    pub fn chi(&self) -> f64 {
        self.g * self.g / self.omega_qr()
    }

    /// Copy of `self` with `n_th` derived from a temperature ratio.
    pub fn with_temperature_ratio(mut self, ratio: f64) -> Result<Self> {
        self.n_th = n_th_from_temperature(ratio)?;
        self.temperature_ratio = Some(ratio);
        Ok(self)
    }

    /// Sets a field by its config name. Used by sweeps and overrides.
    pub fn set_field(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "omega_q" => self.omega_q = value,
            "omega_r" => self.omega_r = value,
            "omega_d" => self.omega_d = value,
            "g" => self.g = value,
            "kappa" => self.kappa = value,
            "epsilon" => self.epsilon = value,
            "n_th" => {
                self.n_th = value;
                self.temperature_ratio = None;
            }
            "temperature_ratio" => *self = self.with_temperature_ratio(value)?,
            other => return Err(Error::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub const FIELD_NAMES: [&'static str; 8] = [
        "omega_q",
        "omega_r",
        "omega_d",
        "g",
        "kappa",
        "epsilon",
        "n_th",
        "temperature_ratio",
    ];
}

/// Named advisory conditions. None of them stops a computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Warning {
    CouplingBound { ratio: f64 },
    DampingBound { ratio: f64 },
    DetuningBound { ratio: f64 },
    FidelityWindow { tau: f64, limit: f64 },
    StationaryOutOfRange { sigma_st: f64 },
    TruncationOverflow { population: f64 },
    RaiseTruncation { predicted: f64, n_fock: usize },
    Other(String),
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::CouplingBound { ratio } => write!(
                f,
                "dispersive bound |g/omega_qr| <= {MAX_COUPLING_RATIO} violated ({ratio})"
            ),
            Warning::DampingBound { ratio } => write!(
                f,
                "dispersive bound kappa/|omega_qr| <= {MAX_DAMPING_RATIO} violated ({ratio})"
            ),
            Warning::DetuningBound { ratio } => write!(
                f,
                "dispersive bound |omega_qr|/omega_r <= {MAX_DETUNING_RATIO} violated ({ratio})"
            ),
            Warning::FidelityWindow { tau, limit } => write!(
                f,
                "closed-form fidelity evaluated outside its window: tau = {tau} >= 2/kappa = {limit}"
            ),
            Warning::StationaryOutOfRange { sigma_st } => {
                write!(f, "stationary value {sigma_st} lies outside [-1, 1]")
            }
            Warning::TruncationOverflow { population } => write!(
                f,
                "top two Fock levels reached population {population} (limit 1e-5)"
            ),
            Warning::RaiseTruncation { predicted, n_fock } => write!(
                f,
                "predicted photon number {predicted} is close to the truncation n_fock = {n_fock}"
            ),
            Warning::Other(s) => f.write_str(s),
        }
    }
}

fn require_finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { field, value })
    }
}

fn require_positive(field: &'static str, value: f64) -> Result<()> {
    require_finite(field, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveRate { field, value })
    }
}

fn require_non_negative(field: &'static str, value: f64) -> Result<()> {
    require_finite(field, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeValue { field, value })
    }
}

/// Checks the hard invariants of `params` and returns the dispersive-regime
/// advisories that apply.
pub fn validate(params: &SystemParams) -> Result<Vec<Warning>> {
    require_positive("kappa", params.kappa)?;
    require_positive("omega_q", params.omega_q)?;
    require_positive("omega_r", params.omega_r)?;
    require_non_negative("omega_d", params.omega_d)?;
    require_non_negative("epsilon", params.epsilon)?;
    require_finite("g", params.g)?;
    require_finite("n_th", params.n_th)?;
    if params.n_th < 0.0 {
        return Err(Error::NegativeOccupancy(params.n_th));
    }
    if params.omega_q == params.omega_r {
        return Err(Error::ZeroDetuning {
            omega: params.omega_q,
        });
    }
    if let Some(ratio) = params.temperature_ratio {
        let expected = n_th_from_temperature(ratio)?;
        if (expected - params.n_th).abs() > OCCUPANCY_CONSISTENCY_TOL {
            return Err(Error::InconsistentOccupancy {
                n_th: params.n_th,
                ratio,
                expected,
            });
        }
    }

    let omega_qr = params.omega_qr();
    let mut warnings = Vec::new();
    let coupling = (params.g / omega_qr).abs();
    if coupling > MAX_COUPLING_RATIO {
        warnings.push(Warning::CouplingBound { ratio: coupling });
    }
    let damping = params.kappa / omega_qr.abs();
    if damping > MAX_DAMPING_RATIO {
        warnings.push(Warning::DampingBound { ratio: damping });
    }
    let detuning = omega_qr.abs() / params.omega_r;
    if detuning > MAX_DETUNING_RATIO {
        warnings.push(Warning::DetuningBound { ratio: detuning });
    }
    Ok(warnings)
}

/// Bose-Einstein occupancy 1 / (e^x − 1) for x = ħω / k_B T.
pub fn n_th_from_temperature(temperature_ratio: f64) -> Result<f64> {
    if !(temperature_ratio > 0.0) {
        return Err(Error::NonPositiveRatio(temperature_ratio));
    }
    Ok(1.0 / temperature_ratio.exp_m1())
}

/// Qubit eigenstate label: +1 ground, −1 excited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QubitSector {
    Ground,
    Excited,
}

impl QubitSector {
    pub const BOTH: [QubitSector; 2] = [QubitSector::Ground, QubitSector::Excited];

    pub fn sigma_z(self) -> f64 {
        match self {
            QubitSector::Ground => 1.0,
            QubitSector::Excited => -1.0,
        }
    }

    /// Parses an integer label; only ±1 are accepted.
    pub fn from_sigma_z(value: i32) -> Option<Self> {
        match value {
            1 => Some(QubitSector::Ground),
            -1 => Some(QubitSector::Excited),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            QubitSector::Ground => "ground",
            QubitSector::Excited => "excited",
        }
    }
}

/// Uniform time grid with `n_steps` intervals (and `n_steps + 1` points).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        let grid = TimeGrid {
            t_start,
            t_end,
            n_steps,
        };
        grid.check()?;
        Ok(grid)
    }

    /// Grid whose spacing is at most `max_dt`.
    pub fn with_max_step(t_start: f64, t_end: f64, max_dt: f64) -> Result<Self> {
        let n_steps = ((t_end - t_start) / max_dt).ceil().max(1.0) as usize;
        Self::new(t_start, t_end, n_steps)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite()) {
            return Err(Error::InvalidGrid("non-finite bounds".into()));
        }
        if self.t_end <= self.t_start {
            return Err(Error::InvalidGrid(format!(
                "t_end ({}) must exceed t_start ({})",
                self.t_end, self.t_start
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidGrid("n_steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_steps as f64
    }

    pub fn span(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_end
        } else {
            self.t_start + k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}

/// Names of the sampled series in a [`Trajectory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    SigmaZ,
    PhotonNumber,
    ReA,
    ImA,
}

impl Column {
    pub const ALL: [Column; 4] = [
        Column::SigmaZ,
        Column::PhotonNumber,
        Column::ReA,
        Column::ImA,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::SigmaZ => "sigma_z",
            Column::PhotonNumber => "photon_number",
            Column::ReA => "re_a",
            Column::ImA => "im_a",
        }
    }
}

/// Sampled observables aligned with a list of times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub sigma_z: Vec<f64>,
    pub photon_number: Vec<f64>,
    pub re_a: Vec<f64>,
    pub im_a: Vec<f64>,
}

impl Trajectory {
    pub fn with_capacity(n: usize) -> Self {
        Trajectory {
            times: Vec::with_capacity(n),
            sigma_z: Vec::with_capacity(n),
            photon_number: Vec::with_capacity(n),
            re_a: Vec::with_capacity(n),
            im_a: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, t: f64, sigma_z: f64, photon_number: f64, re_a: f64, im_a: f64) {
        self.times.push(t);
        self.sigma_z.push(sigma_z);
        self.photon_number.push(photon_number);
        self.re_a.push(re_a);
        self.im_a.push(im_a);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, column: Column) -> &[f64] {
        match column {
            Column::SigmaZ => &self.sigma_z,
            Column::PhotonNumber => &self.photon_number,
            Column::ReA => &self.re_a,
            Column::ImA => &self.im_a,
        }
    }

    /// True when every series is aligned with `times` and time increases.
    pub fn is_consistent(&self) -> bool {
        let n = self.times.len();
        Column::ALL.iter().all(|c| self.column(*c).len() == n)
            && self.times.windows(2).all(|w| w[1] > w[0])
    }

    pub fn last_sigma_z(&self) -> Option<f64> {
        self.sigma_z.last().copied()
    }
}
