use ndarray::{Array1, Array2};
use num_complex::Complex64;

use super::hamiltonian::build_hamiltonian;
use super::lindblad::Generator;
use super::state::{DensityMatrix, StateDiagnostics};
use super::{Frame, OracleConfig, Propagation};
use crate::analytic::photon_number;
use crate::error::{Error, Result};
use crate::model::{QubitSector, SystemParams, TimeGrid, Trajectory, Warning};

/// Largest admissible dt · ω_max.
pub const STEP_RESOLUTION: f64 = 0.05;
/// Population allowed in the two highest Fock levels.
pub const TRUNCATION_LIMIT: f64 = 1e-5;
/// Superoperators above this dimension are never formed.
const MAX_PROPAGATOR_DIM: usize = 2500;
/// zgemm throughput relative to the sparse stage loops.
const DENSE_SPEEDUP: f64 = 2.0;
/// Number of evenly spread samples that get a full eigenvalue check.
const EIGEN_CHECKS: usize = 256;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fastest frequency the integrator has to resolve in the chosen frame.
pub fn max_frequency(params: &SystemParams, config: &OracleConfig) -> f64 {
    let common = [params.g.abs(), params.kappa, params.epsilon];
    let frame = match config.frame {
        Frame::Lab => [params.omega_q, params.omega_r, params.omega_d],
        Frame::Rotating => [
            (params.omega_q - params.omega_d).abs(),
            (params.omega_r - params.omega_d).abs(),
            0.0,
        ],
    };
    common.into_iter().chain(frame).fold(0.0, f64::max)
}

pub fn step_limit(params: &SystemParams, config: &OracleConfig) -> f64 {
    STEP_RESOLUTION / max_frequency(params, config)
}

/// Output of one master-equation run.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub trajectory: Trajectory,
    pub final_state: DensityMatrix,
    pub diagnostics: StateDiagnostics,
    pub warnings: Vec<Warning>,
    /// RK4 steps between consecutive grid points.
    pub substeps: usize,
    pub method: Propagation,
}

pub fn evolve(
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    params: &SystemParams,
    config: &OracleConfig,
) -> Result<Evolution> {
    evolve_observed(rho0, grid, params, config, |_, _, _| {})
}

/// Peak photon number expected from the closed-form model or the initial
/// state, whichever is larger.
fn predicted_peak(params: &SystemParams, rho0: &DensityMatrix) -> f64 {
    QubitSector::BOTH
        .iter()
        .map(|&s| photon_number(params, s, false))
        .filter(|n| n.is_finite())
        .fold(rho0.photon_number(), f64::max)
}

fn substeps_for(interval: f64, params: &SystemParams, config: &OracleConfig) -> Result<usize> {
    let limit = step_limit(params, config);
    let dt = match config.dt {
        Some(dt) => {
            if dt > limit * (1.0 + 1e-12) {
                return Err(Error::StepTooLarge { dt, limit });
            }
            dt
        }
        None => limit,
    };
    Ok(((interval / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize)
}

fn resolve_method(
    config: &OracleConfig,
    generator: &Generator,
    intervals: usize,
    substeps: usize,
) -> Result<Propagation> {
    let dd = generator.dim() * generator.dim();
    let propagator_ok = generator.is_static() && dd <= MAX_PROPAGATOR_DIM;
    match config.propagation {
        Propagation::Stepping => Ok(Propagation::Stepping),
        Propagation::Propagator if propagator_ok => Ok(Propagation::Propagator),
        Propagation::Propagator => Err(Error::UnsupportedCombination(
            "propagator needs a time-independent generator of modest size".into(),
        )),
        Propagation::Auto if !propagator_ok => Ok(Propagation::Stepping),
        Propagation::Auto => {
            let stepping = intervals as f64 * substeps as f64 * 4.0 * generator.cost() as f64;
            let products = power_products(substeps) + 3;
            let dd = dd as f64;
            let propagator = dd * generator.cost() as f64
                + products as f64 * dd.powi(3) / DENSE_SPEEDUP
                + intervals as f64 * dd * dd;
            Ok(if propagator < stepping {
                Propagation::Propagator
            } else {
                Propagation::Stepping
            })
        }
    }
}

/// Matrix products used by binary exponentiation to the power `k`.
fn power_products(k: usize) -> usize {
    let bits = usize::BITS - k.leading_zeros();
    (bits as usize - 1) + (k.count_ones() as usize - 1)
}

/// As [`evolve`], additionally handing every sampled state to `observer`.
pub fn evolve_observed<F>(
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    params: &SystemParams,
    config: &OracleConfig,
    mut observer: F,
) -> Result<Evolution>
where
    F: FnMut(usize, f64, &DensityMatrix),
{
    grid.check()?;
    config.check()?;
    let spec = config.hilbert;
    if rho0.spec() != spec {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: rho0.spec().dim(),
        });
    }
    let hamiltonian = build_hamiltonian(params, config)?;
    let generator = Generator::new(&hamiltonian, params);
    let intervals = grid.n_steps;
    let substeps = substeps_for(grid.dt(), params, config)?;
    let method = resolve_method(config, &generator, intervals, substeps)?;
    let h = grid.dt() / substeps as f64;

    let mut warnings = Vec::new();
    let peak = predicted_peak(params, rho0);
    if peak + 5.0 * peak.sqrt() >= spec.n_fock as f64 {
        warnings.push(Warning::RaiseTruncation {
            predicted: peak,
            n_fock: spec.n_fock,
        });
    }

    let mut trajectory = Trajectory::with_capacity(grid.len());
    let mut diagnostics = StateDiagnostics::default();
    let eigen_stride = grid.len().div_ceil(EIGEN_CHECKS);
    let mut record = |k: usize, state: &DensityMatrix| {
        let t = grid.time(k);
        let a = state.field();
        trajectory.push(t, state.sigma_z(), state.photon_number(), a.re, a.im);
        let mut d = StateDiagnostics {
            trace_error: (state.trace() - 1.0).norm(),
            hermiticity_error: state.hermiticity_error(),
            top_fock_population: state.top_fock_population(2),
            ..StateDiagnostics::default()
        };
        if k % eigen_stride == 0 || k == intervals {
            d.min_eigenvalue = state.min_eigenvalue();
        }
        diagnostics.merge(&d);
        observer(k, t, state);
    };

    let mut current = rho0.clone();
    record(0, &current);
    match method {
        Propagation::Propagator => {
            let step = propagator(&generator, h, substeps);
            let mut v = Array1::from(current.as_flat().to_vec());
            for k in 1..=intervals {
                v = step.dot(&v);
                current = DensityMatrix::from_flat(spec, v.to_vec());
                record(k, &current);
            }
        }
        _ => {
            let mut stepper = Rk4::new(&generator);
            let mut y = current.as_flat().to_vec();
            for k in 1..=intervals {
                let t0 = grid.time(k - 1);
                for s in 0..substeps {
                    stepper.step(t0 + s as f64 * h, h, &mut y);
                }
                current = DensityMatrix::from_flat(spec, y.clone());
                record(k, &current);
            }
        }
    }

    if diagnostics.top_fock_population >= TRUNCATION_LIMIT {
        warnings.push(Warning::TruncationOverflow {
            population: diagnostics.top_fock_population,
        });
    }
    Ok(Evolution {
        trajectory,
        final_state: current,
        diagnostics,
        warnings,
        substeps,
        method,
    })
}

struct Rk4<'a> {
    generator: &'a Generator,
    k: [Vec<Complex64>; 4],
    stage: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl<'a> Rk4<'a> {
    fn new(generator: &'a Generator) -> Self {
        let n = generator.dim() * generator.dim();
        let buf = || vec![ZERO; n];
        Rk4 {
            generator,
            k: [buf(), buf(), buf(), buf()],
            stage: buf(),
            scratch: buf(),
        }
    }

    fn step(&mut self, t: f64, h: f64, y: &mut [Complex64]) {
        let [k1, k2, k3, k4] = &mut self.k;
        let g = self.generator;
        g.apply(t, y, k1, &mut self.scratch);
        for ((s, y), k) in self.stage.iter_mut().zip(y.iter()).zip(k1.iter()) {
            *s = y + k * (0.5 * h);
        }
        g.apply(t + 0.5 * h, &self.stage, k2, &mut self.scratch);
        for ((s, y), k) in self.stage.iter_mut().zip(y.iter()).zip(k2.iter()) {
            *s = y + k * (0.5 * h);
        }
        g.apply(t + 0.5 * h, &self.stage, k3, &mut self.scratch);
        for ((s, y), k) in self.stage.iter_mut().zip(y.iter()).zip(k3.iter()) {
            *s = y + k * h;
        }
        g.apply(t + h, &self.stage, k4, &mut self.scratch);
        let w = h / 6.0;
        for (i, y) in y.iter_mut().enumerate() {
            *y += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }
}

/// Matrix of the static generator acting on row-major vectorized ρ.
pub(crate) fn superoperator(generator: &Generator) -> Array2<Complex64> {
    let dd = generator.dim() * generator.dim();
    let mut l = Array2::zeros((dd, dd));
    let mut basis = vec![ZERO; dd];
    let mut out = vec![ZERO; dd];
    let mut scratch = vec![ZERO; dd];
    for k in 0..dd {
        basis[k] = Complex64::new(1.0, 0.0);
        generator.apply(0.0, &basis, &mut out, &mut scratch);
        for (r, v) in out.iter().enumerate() {
            l[[r, k]] = *v;
        }
        basis[k] = ZERO;
    }
    l
}

fn add_identity(m: &mut Array2<Complex64>) {
    for i in 0..m.nrows() {
        m[[i, i]] += 1.0;
    }
}

/// `substeps` RK4 steps of size `h` as one matrix: the RK4 stability
/// polynomial of hL raised to the power `substeps`.
fn propagator(generator: &Generator, h: f64, substeps: usize) -> Array2<Complex64> {
    let a = superoperator(generator).mapv(|z| z * h);
    let mut m = a.mapv(|z| z * 0.25);
    add_identity(&mut m);
    for div in [3.0, 2.0] {
        m = a.dot(&m).mapv(|z| z / div);
        add_identity(&mut m);
    }
    m = a.dot(&m);
    add_identity(&mut m);

    let mut k = substeps;
    let mut result: Option<Array2<Complex64>> = None;
    loop {
        if k & 1 == 1 {
            result = Some(match result {
                None => m.clone(),
                Some(r) => r.dot(&m),
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        m = m.dot(&m);
    }
    result.expect("substeps ≥ 1")
}
