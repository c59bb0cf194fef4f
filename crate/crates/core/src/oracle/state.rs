use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;

use super::operators::{adjoint, annihilation, hermiticity_error, CMatrix, HilbertSpec};
use crate::error::{Error, Result};
use crate::model::QubitSector;

/// Density matrix on the qubit ⊗ Fock space, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    spec: HilbertSpec,
    data: CMatrix,
}

/// Worst-case health numbers of one or more density matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub top_fock_population: f64,
}

impl Default for StateDiagnostics {
    fn default() -> Self {
        StateDiagnostics {
            trace_error: 0.0,
            hermiticity_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            top_fock_population: 0.0,
        }
    }
}

impl StateDiagnostics {
    pub fn merge(&mut self, other: &StateDiagnostics) {
        self.trace_error = self.trace_error.max(other.trace_error);
        self.hermiticity_error = self.hermiticity_error.max(other.hermiticity_error);
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
        self.top_fock_population = self.top_fock_population.max(other.top_fock_population);
    }
}

fn sector_offset(spec: HilbertSpec, sector: QubitSector) -> usize {
    spec.index(sector == QubitSector::Excited, 0)
}

impl DensityMatrix {
    pub fn new(spec: HilbertSpec, data: CMatrix) -> Result<Self> {
        spec.check()?;
        let d = spec.dim();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: data.nrows().max(data.ncols()),
            });
        }
        let data = data.as_standard_layout().into_owned();
        Ok(DensityMatrix { spec, data })
    }

    pub(crate) fn from_flat(spec: HilbertSpec, flat: Vec<Complex64>) -> Self {
        let d = spec.dim();
        DensityMatrix {
            spec,
            data: Array2::from_shape_vec((d, d), flat).expect("flat buffer of dim²"),
        }
    }

    pub fn spec(&self) -> HilbertSpec {
        self.spec
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub(crate) fn as_flat(&self) -> &[Complex64] {
        self.data.as_slice().expect("standard layout")
    }

    /// |q⟩⟨q| ⊗ ρ_r.
    pub fn product(spec: HilbertSpec, sector: QubitSector, resonator: &CMatrix) -> Result<Self> {
        Self::mixture(spec, &[(1.0, sector, resonator)])
    }

    /// Σ w_k |q_k⟩⟨q_k| ⊗ ρ_k, block-diagonal in the qubit.
    pub fn mixture(spec: HilbertSpec, parts: &[(f64, QubitSector, &CMatrix)]) -> Result<Self> {
        spec.check()?;
        let n = spec.n_fock;
        let mut data = CMatrix::zeros((spec.dim(), spec.dim()));
        for &(w, sector, r) in parts {
            if r.nrows() != n || r.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.nrows(),
                });
            }
            let off = sector_offset(spec, sector);
            for i in 0..n {
                for j in 0..n {
                    data[[off + i, off + j]] += r[[i, j]] * w;
                }
            }
        }
        Ok(DensityMatrix { spec, data })
    }

    /// Diagonal qubit mixture with ⟨σ_z⟩ = σ_z0, each sector carrying its own
    /// resonator state.
    pub fn ensemble(
        spec: HilbertSpec,
        sigma_z0: f64,
        ground_resonator: &CMatrix,
        excited_resonator: &CMatrix,
    ) -> Result<Self> {
        if !(sigma_z0.abs() <= 1.0) {
            return Err(Error::SigmaOutOfRange(sigma_z0));
        }
        Self::mixture(
            spec,
            &[
                (0.5 * (1.0 + sigma_z0), QubitSector::Ground, ground_resonator),
                (0.5 * (1.0 - sigma_z0), QubitSector::Excited, excited_resonator),
            ],
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diag().iter().sum()
    }

    pub fn sigma_z(&self) -> f64 {
        let n = self.spec.n_fock;
        (0..n)
            .map(|k| self.data[[k, k]].re - self.data[[n + k, n + k]].re)
            .sum()
    }

    pub fn photon_number(&self) -> f64 {
        let n = self.spec.n_fock;
        (0..n)
            .map(|k| k as f64 * (self.data[[k, k]].re + self.data[[n + k, n + k]].re))
            .sum()
    }

    /// ⟨a⟩ = tr(aρ).
    pub fn field(&self) -> Complex64 {
        let n = self.spec.n_fock;
        let mut acc = Complex64::new(0.0, 0.0);
        for off in [0, n] {
            for k in 1..n {
                acc += self.data[[off + k, off + k - 1]] * (k as f64).sqrt();
            }
        }
        acc
    }

    pub fn sector_population(&self, sector: QubitSector) -> f64 {
        let off = sector_offset(self.spec, sector);
        (0..self.spec.n_fock).map(|k| self.data[[off + k, off + k]].re).sum()
    }

    /// tr(P_q a†a ρ) / tr(P_q ρ): photon number conditioned on the qubit sector.
    pub fn sector_photon_number(&self, sector: QubitSector) -> f64 {
        let off = sector_offset(self.spec, sector);
        let weighted: f64 = (0..self.spec.n_fock)
            .map(|k| k as f64 * self.data[[off + k, off + k]].re)
            .sum();
        weighted / self.sector_population(sector)
    }

    /// Population of the highest `levels` Fock states, summed over the qubit.
    pub fn top_fock_population(&self, levels: usize) -> f64 {
        let n = self.spec.n_fock;
        let levels = levels.min(n);
        (n - levels..n)
            .map(|k| self.data[[k, k]].re + self.data[[n + k, n + k]].re)
            .sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.data)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.spec.dim();
        let m = DMatrix::from_fn(d, d, |i, j| {
            0.5 * (self.data[[i, j]] + self.data[[j, i]].conj())
        });
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        StateDiagnostics {
            trace_error: (self.trace() - 1.0).norm(),
            hermiticity_error: self.hermiticity_error(),
            min_eigenvalue: self.min_eigenvalue(),
            top_fock_population: self.top_fock_population(2),
        }
    }
}

/// Thermal resonator state with mean occupancy `n_th`, truncated to
/// `n_fock` levels and renormalized.
pub fn thermal_state(n_fock: usize, n_th: f64) -> CMatrix {
    let ratio = if n_th > 0.0 { n_th / (1.0 + n_th) } else { 0.0 };
    let weights: Vec<f64> = (0..n_fock).map(|k| ratio.powi(k as i32)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = CMatrix::zeros((n_fock, n_fock));
    for (k, w) in weights.iter().enumerate() {
        rho[[k, k]] = Complex64::new(w / total, 0.0);
    }
    rho
}

/// D(α) ρ_th D(α)†, built in an enlarged Fock space and cut back to `n_fock`
/// levels with the trace restored.
pub fn displaced_thermal_state(n_fock: usize, alpha: Complex64, n_th: f64) -> CMatrix {
    if alpha.norm() == 0.0 {
        return thermal_state(n_fock, n_th);
    }
    let spread = alpha.norm_sqr() + n_th;
    let big = n_fock + 20 + (4.0 * spread + 10.0 * spread.sqrt()).ceil() as usize;
    let a = annihilation(big);
    let generator = a.t().mapv(|z| z * alpha) - a.mapv(|z| z * alpha.conj());
    // K = iG is Hermitian and D = exp(G) = V exp(−iΛ) V†
    let k = DMatrix::from_fn(big, big, |i, j| Complex64::i() * generator[[i, j]]);
    let eig = k.symmetric_eigen();
    let phases = eig
        .eigenvalues
        .map(|lambda| Complex64::new(0.0, -lambda).exp());
    let v = &eig.eigenvectors;
    let d = v * DMatrix::from_diagonal(&phases) * v.adjoint();

    let thermal = thermal_state(big, n_th);
    let d_nd = Array2::from_shape_fn((big, big), |(i, j)| d[(i, j)]);
    let full = d_nd.dot(&thermal).dot(&adjoint(&d_nd));
    let mut cut = full.slice(ndarray::s![..n_fock, ..n_fock]).to_owned();
    let tr: Complex64 = cut.diag().iter().sum();
    cut.mapv_inplace(|z| z / tr.re);
    // restore exact Hermiticity lost to rounding
    let herm = (&cut + &adjoint(&cut)).mapv(|z| z * 0.5);
    herm.as_standard_layout().into_owned()
}
