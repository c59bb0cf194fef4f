//! Operators on the truncated qubit ⊗ Fock space.
//!
//! Basis index is `q * n_fock + n`, with q = 0 the ground state (σ_z = +1)
//! and q = 1 the excited state (σ_z = −1).

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = Array2<Complex64>;

pub const DEFAULT_N_FOCK: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSpec {
    pub n_fock: usize,
}

impl Default for HilbertSpec {
    fn default() -> Self {
        HilbertSpec {
            n_fock: DEFAULT_N_FOCK,
        }
    }
}

impl HilbertSpec {
    pub fn new(n_fock: usize) -> Result<Self> {
        let spec = HilbertSpec { n_fock };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if self.n_fock < 2 {
            return Err(Error::InvalidTruncation(self.n_fock));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        2 * self.n_fock
    }

    pub fn index(&self, excited: bool, n: usize) -> usize {
        usize::from(excited) * self.n_fock + n
    }
}

/// Dense matrices of the basic operators.
#[derive(Debug, Clone)]
pub struct Operators {
    pub spec: HilbertSpec,
    pub a: CMatrix,
    pub a_dag: CMatrix,
    pub number: CMatrix,
    pub sigma_z: CMatrix,
    /// Maps excited → ground (raises σ_z).
    pub sigma_plus: CMatrix,
    pub sigma_minus: CMatrix,
    pub identity: CMatrix,
}

fn kron(left: &CMatrix, right: &CMatrix) -> CMatrix {
    let (lr, lc) = left.dim();
    let (rr, rc) = right.dim();
    Array2::from_shape_fn((lr * rr, lc * rc), |(i, j)| {
        left[[i / rr, j / rc]] * right[[i % rr, j % rc]]
    })
}

pub(crate) fn annihilation(n_fock: usize) -> CMatrix {
    let mut a = CMatrix::zeros((n_fock, n_fock));
    for n in 1..n_fock {
        a[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub(crate) fn adjoint(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn build_operators(spec: HilbertSpec) -> Result<Operators> {
    spec.check()?;
    let one = Complex64::new(1.0, 0.0);
    let fock_id = CMatrix::eye(spec.n_fock);
    let qubit_id = CMatrix::eye(2);
    let mut sz = CMatrix::zeros((2, 2));
    sz[[0, 0]] = one;
    sz[[1, 1]] = -one;
    let mut sp = CMatrix::zeros((2, 2));
    sp[[0, 1]] = one;

    let a = kron(&qubit_id, &annihilation(spec.n_fock));
    let a_dag = adjoint(&a);
    let sigma_plus = kron(&sp, &fock_id);
    Ok(Operators {
        spec,
        number: a_dag.dot(&a),
        sigma_minus: adjoint(&sigma_plus),
        sigma_z: kron(&sz, &fock_id),
        identity: CMatrix::eye(spec.dim()),
        a,
        a_dag,
        sigma_plus,
    })
}

/// Largest entrywise |M − M†|.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn truncated_commutator() {
        let ops = build_operators(HilbertSpec::new(6).unwrap()).unwrap();
        let comm = ops.a.dot(&ops.a_dag) - ops.a_dag.dot(&ops.a);
        let n = 6;
        for q in 0..2 {
            for k in 0..n {
                let i = q * n + k;
                let expected = if k == n - 1 { -((n - 1) as f64) } else { 1.0 };
                assert!((comm[[i, i]].re - expected).abs() < 1e-12);
            }
        }
        let off: f64 = (0..12)
            .flat_map(|i| (0..12).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| comm[[i, j]].norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-15);
    }

    #[test]
    fn sigma_algebra() {
        let spec = HilbertSpec::new(4).unwrap();
        let ops = build_operators(spec).unwrap();
        // σ−σ+ = (1 − σ_z)/2
        let lhs = ops.sigma_minus.dot(&ops.sigma_plus);
        let rhs = (&ops.identity - &ops.sigma_z).mapv(|z| z * 0.5);
        assert!(max_abs(&(lhs.clone() - rhs)) < 1e-15);
        let excited_vacuum = spec.index(true, 0);
        assert_eq!(lhs[[excited_vacuum, excited_vacuum]].re, 1.0);
        // σ+ raises σ_z: excited → ground
        let ground_vacuum = spec.index(false, 0);
        assert_eq!(ops.sigma_plus[[ground_vacuum, excited_vacuum]].re, 1.0);
    }

    #[test]
    fn vacuum_is_annihilated() {
        let spec = HilbertSpec::new(5).unwrap();
        let ops = build_operators(spec).unwrap();
        for excited in [false, true] {
            let v = spec.index(excited, 0);
            assert!(ops.a.column(v).iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn truncation_must_hold_two_levels() {
        assert!(HilbertSpec::new(1).is_err());
    }
}
