use num_complex::Complex64;

use super::hamiltonian::{Hamiltonian, LabDrive};
use super::operators::{adjoint, build_operators, CMatrix};
use super::sparse::SparseOp;
use super::state::DensityMatrix;
use crate::error::{Error, Result};
use crate::model::SystemParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Resonator jump operators with their rates: photon loss κ(n_th + 1) and
/// thermal absorption κ n_th.
fn jump_rates(params: &SystemParams) -> [f64; 2] {
    [params.kappa * (params.n_th + 1.0), params.kappa * params.n_th]
}

/// dρ/dt = −i[H, ρ] + Σ_k r_k (c_k ρ c_k† − ½{c_k†c_k, ρ}) with dense products.
pub fn lindblad_rhs(rho: &DensityMatrix, h: &CMatrix, params: &SystemParams) -> Result<CMatrix> {
    let spec = rho.spec();
    let d = spec.dim();
    if h.nrows() != d || h.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: h.nrows(),
        });
    }
    let ops = build_operators(spec)?;
    let r = rho.matrix();
    let mut out = (h.dot(r) - r.dot(h)).mapv(|z| z * -I);
    for (rate, c) in jump_rates(params).into_iter().zip([&ops.a, &ops.a_dag]) {
        if rate == 0.0 {
            continue;
        }
        let c_dag = adjoint(c);
        let cc = c_dag.dot(c);
        let term = c.dot(r).dot(&c_dag) - (cc.dot(r) + r.dot(&cc)).mapv(|z| z * 0.5);
        out = out + term.mapv(|z| z * rate);
    }
    Ok(out)
}

struct Jump {
    rate: f64,
    op: SparseOp,
    op_dag: SparseOp,
}

struct Drive {
    drive: LabDrive,
    raise: SparseOp,
    lower: SparseOp,
}

/// Sparse evaluation of the same right-hand side through the non-Hermitian
/// effective Hamiltonian H − (i/2) Σ r c†c.
pub(crate) struct Generator {
    dim: usize,
    h_eff: SparseOp,
    h_eff_dag: SparseOp,
    jumps: Vec<Jump>,
    drive: Option<Drive>,
}

impl Generator {
    pub(crate) fn new(h: &Hamiltonian, params: &SystemParams) -> Self {
        let ops = h.operators();
        let mut h_eff = h.static_part.clone();
        let mut jumps = Vec::new();
        for (rate, c) in jump_rates(params).into_iter().zip([&ops.a, &ops.a_dag]) {
            if rate == 0.0 {
                continue;
            }
            let c_dag = adjoint(c);
            h_eff = h_eff - c_dag.dot(c).mapv(|z| z * Complex64::new(0.0, 0.5 * rate));
            jumps.push(Jump {
                rate,
                op: SparseOp::from_dense(c),
                op_dag: SparseOp::from_dense(&c_dag),
            });
        }
        Generator {
            dim: ops.spec.dim(),
            h_eff_dag: SparseOp::from_dense(&adjoint(&h_eff)),
            h_eff: SparseOp::from_dense(&h_eff),
            jumps,
            drive: h.drive.map(|drive| Drive {
                drive,
                raise: SparseOp::from_dense(&ops.a_dag),
                lower: SparseOp::from_dense(&ops.a),
            }),
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn is_static(&self) -> bool {
        self.drive.is_none()
    }

    /// Complex multiply-adds per evaluation.
    pub(crate) fn cost(&self) -> usize {
        let mut nnz = 2 * self.h_eff.nnz();
        for j in &self.jumps {
            nnz += j.op.nnz() + j.op_dag.nnz();
        }
        if let Some(d) = &self.drive {
            nnz += 2 * (d.raise.nnz() + d.lower.nnz());
        }
        nnz * self.dim
    }

    /// out = L_t(rho); `scratch` must hold dim² entries.
    pub(crate) fn apply(&self, t: f64, rho: &[Complex64], out: &mut [Complex64], scratch: &mut [Complex64]) {
        out.fill(ZERO);
        self.h_eff.left_mul_add(-I, rho, out);
        self.h_eff_dag.right_mul_add(I, rho, out);
        if let Some(d) = &self.drive {
            let u = d.drive.coefficient(t);
            d.raise.left_mul_add(-I * u, rho, out);
            d.lower.left_mul_add(-I * u.conj(), rho, out);
            d.raise.right_mul_add(I * u, rho, out);
            d.lower.right_mul_add(I * u.conj(), rho, out);
        }
        for j in &self.jumps {
            scratch.fill(ZERO);
            j.op.left_mul_add(Complex64::new(1.0, 0.0), rho, scratch);
            j.op_dag.right_mul_add(Complex64::new(j.rate, 0.0), scratch, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::QubitSector;
    use crate::oracle::hamiltonian::build_hamiltonian;
    use crate::oracle::{displaced_thermal_state, Coupling, Frame, HilbertSpec, OracleConfig};
    use ndarray::Array2;

    fn params() -> SystemParams {
        SystemParams {
            omega_q: 6.0,
            omega_r: 5.0,
            omega_d: 5.1,
            g: 0.2,
            kappa: 0.3,
            epsilon: 0.4,
            n_th: 0.25,
            temperature_ratio: None,
        }
    }

    fn fock_state(spec: HilbertSpec, sector: QubitSector, n: usize) -> DensityMatrix {
        let mut r = CMatrix::zeros((spec.n_fock, spec.n_fock));
        r[[n, n]] = Complex64::new(1.0, 0.0);
        DensityMatrix::product(spec, sector, &r).unwrap()
    }

    fn photon_rate(rho: &DensityMatrix, drho: CMatrix) -> f64 {
        DensityMatrix::new(rho.spec(), drho).unwrap().photon_number()
    }

    fn generic_state(spec: HilbertSpec) -> DensityMatrix {
        let g = displaced_thermal_state(spec.n_fock, Complex64::new(0.3, 0.2), 0.1);
        let e = displaced_thermal_state(spec.n_fock, Complex64::new(-0.1, 0.4), 0.1);
        let mut rho = DensityMatrix::ensemble(spec, 0.2, &g, &e).unwrap().matrix().clone();
        // qubit coherence
        let n = spec.n_fock;
        rho[[0, n + 1]] = Complex64::new(0.05, 0.02);
        rho[[n + 1, 0]] = Complex64::new(0.05, -0.02);
        DensityMatrix::new(spec, rho).unwrap()
    }

    #[test]
    fn derivative_is_trace_free() {
        let spec = HilbertSpec::new(6).unwrap();
        let rho = generic_state(spec);
        for coupling in [Coupling::Full, Coupling::Rwa] {
            let cfg = OracleConfig {
                frame: Frame::Lab,
                coupling,
                hilbert: spec,
                ..OracleConfig::default()
            };
            let h = build_hamiltonian(&params(), &cfg).unwrap();
            let drho = lindblad_rhs(&rho, &h.at(0.2), &params()).unwrap();
            let tr: Complex64 = drho.diag().iter().sum();
            assert!(tr.norm() < 1e-12);
        }
    }

    #[test]
    fn cold_photon_decay() {
        let spec = HilbertSpec::new(4).unwrap();
        let p = SystemParams {
            n_th: 0.0,
            ..params()
        };
        let rho = fock_state(spec, QubitSector::Ground, 1);
        let zero = CMatrix::zeros((8, 8));
        let rate = photon_rate(&rho, lindblad_rhs(&rho, &zero, &p).unwrap());
        assert!((rate + p.kappa).abs() < 1e-14);
    }

    #[test]
    fn thermal_pumping_of_vacuum() {
        let spec = HilbertSpec::new(4).unwrap();
        let p = params();
        let rho = fock_state(spec, QubitSector::Excited, 0);
        let zero = CMatrix::zeros((8, 8));
        let rate = photon_rate(&rho, lindblad_rhs(&rho, &zero, &p).unwrap());
        assert!((rate - p.kappa * p.n_th).abs() < 1e-14);
    }

    #[test]
    fn mismatched_hamiltonian() {
        let spec = HilbertSpec::new(4).unwrap();
        let rho = fock_state(spec, QubitSector::Ground, 0);
        let h = CMatrix::zeros((6, 6));
        assert!(matches!(
            lindblad_rhs(&rho, &h, &params()),
            Err(Error::DimensionMismatch { expected: 8, got: 6 })
        ));
    }

    #[test]
    fn sparse_generator_matches_dense() {
        let spec = HilbertSpec::new(5).unwrap();
        let rho = generic_state(spec);
        for (frame, coupling) in [
            (Frame::Lab, Coupling::Full),
            (Frame::Lab, Coupling::Rwa),
            (Frame::Rotating, Coupling::Rwa),
        ] {
            let cfg = OracleConfig {
                frame,
                coupling,
                hilbert: spec,
                ..OracleConfig::default()
            };
            let h = build_hamiltonian(&params(), &cfg).unwrap();
            let gen = Generator::new(&h, &params());
            let t = 0.7;
            let dense = lindblad_rhs(&rho, &h.at(t), &params()).unwrap();
            let d = spec.dim();
            let mut out = vec![ZERO; d * d];
            let mut scratch = vec![ZERO; d * d];
            gen.apply(t, rho.as_flat(), &mut out, &mut scratch);
            let sparse = Array2::from_shape_vec((d, d), out).unwrap();
            let worst = (&sparse - &dense).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(worst < 1e-13, "{frame:?} {coupling:?}: {worst}");
        }
    }
}
