use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::evolve::superoperator;
use super::hamiltonian::build_hamiltonian;
use super::lindblad::Generator;
use super::state::DensityMatrix;
use super::{Frame, OracleConfig};
use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Null vector of the rotating-frame Liouvillian normalized to unit trace,
/// by LU on the superoperator with one row traded for tr ρ = 1.
pub fn steady_state(params: &SystemParams, config: &OracleConfig) -> Result<DensityMatrix> {
    if config.frame != Frame::Rotating {
        return Err(Error::UnsupportedCombination(
            "steady state needs the time-independent rotating frame".into(),
        ));
    }
    let hamiltonian = build_hamiltonian(params, config)?;
    let generator = Generator::new(&hamiltonian, params);
    let d = generator.dim();
    let l = superoperator(&generator);
    let dd = d * d;
    let mut m = DMatrix::from_fn(dd, dd, |i, j| l[[i, j]]);
    for j in 0..dd {
        m[(0, j)] = Complex64::new(0.0, 0.0);
    }
    for i in 0..d {
        m[(0, i * d + i)] = Complex64::new(1.0, 0.0);
    }
    let mut rhs = DVector::zeros(dd);
    rhs[0] = Complex64::new(1.0, 0.0);
    let x = m.lu().solve(&rhs).ok_or(Error::SingularGenerator)?;
    if !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::SingularGenerator);
    }
    let rho = DensityMatrix::from_flat(config.hilbert, x.iter().copied().collect());
    let sym = (rho.matrix() + &rho.matrix().t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
    DensityMatrix::new(config.hilbert, sym)
}
