use num_complex::Complex64;

use super::operators::{build_operators, CMatrix, Operators};
use super::{Coupling, Frame, OracleConfig};
use crate::error::Result;
use crate::model::SystemParams;

/// Classical drive iε(e^{−iω_d t} a† − e^{iω_d t} a) kept explicit in the lab
/// frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabDrive {
    pub epsilon: f64,
    pub omega_d: f64,
}

impl LabDrive {
    /// Coefficient u(t) of a†; the coefficient of a is its conjugate.
    pub fn coefficient(&self, t: f64) -> Complex64 {
        Complex64::new(0.0, self.epsilon) * Complex64::from_polar(1.0, -self.omega_d * t)
    }
}

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub static_part: CMatrix,
    pub drive: Option<LabDrive>,
    pub(crate) ops: Operators,
}

impl Hamiltonian {
    pub fn is_static(&self) -> bool {
        self.drive.is_none()
    }

    pub fn operators(&self) -> &Operators {
        &self.ops
    }

    pub fn at(&self, t: f64) -> CMatrix {
        match self.drive {
            None => self.static_part.clone(),
            Some(drive) => {
                let u = drive.coefficient(t);
                &self.static_part + &self.ops.a_dag.mapv(|z| z * u) + &self.ops.a.mapv(|z| z * u.conj())
            }
        }
    }
}

pub fn build_hamiltonian(params: &SystemParams, config: &OracleConfig) -> Result<Hamiltonian> {
    config.check()?;
    let ops = build_operators(config.hilbert)?;
    let c = |x: f64| Complex64::new(x, 0.0);
    let rwa = ops.sigma_plus.dot(&ops.a_dag) + ops.sigma_minus.dot(&ops.a);

    let (static_part, drive) = match config.frame {
        Frame::Lab => {
            let coupling = match config.coupling {
                Coupling::Rwa => rwa,
                Coupling::Full => {
                    let qubit = &ops.sigma_plus - &ops.sigma_minus;
                    let field = &ops.a_dag - &ops.a;
                    qubit.dot(&field)
                }
            };
            let h = ops.sigma_z.mapv(|z| z * c(-0.5 * params.omega_q))
                + ops.number.mapv(|z| z * c(params.omega_r))
                + coupling.mapv(|z| z * c(params.g));
            let drive = (params.epsilon != 0.0).then_some(LabDrive {
                epsilon: params.epsilon,
                omega_d: params.omega_d,
            });
            (h, drive)
        }
        Frame::Rotating => {
            let push = (&ops.a_dag - &ops.a).mapv(|z| z * Complex64::new(0.0, params.epsilon));
            let h = ops.sigma_z.mapv(|z| z * c(-0.5 * (params.omega_q - params.omega_d)))
                + ops.number.mapv(|z| z * c(params.omega_r - params.omega_d))
                + rwa.mapv(|z| z * c(params.g))
                + push;
            (h, None)
        }
    };
    Ok(Hamiltonian {
        static_part,
        drive,
        ops,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::oracle::{hermiticity_error, HilbertSpec};
    use nalgebra::DMatrix;

    fn params() -> SystemParams {
        SystemParams {
            omega_q: 6.0,
            omega_r: 5.0,
            omega_d: 5.2,
            g: 0.1,
            kappa: 0.05,
            epsilon: 0.3,
            n_th: 0.0,
            temperature_ratio: None,
        }
    }

    fn config(frame: Frame, coupling: Coupling) -> OracleConfig {
        OracleConfig {
            frame,
            coupling,
            hilbert: HilbertSpec::new(5).unwrap(),
            ..OracleConfig::default()
        }
    }

    #[test]
    fn rotating_full_is_rejected() {
        let err = build_hamiltonian(&params(), &config(Frame::Rotating, Coupling::Full)).unwrap_err();
        assert!(matches!(err, Error::UnsupportedCombination(_)));
    }

    #[test]
    fn decoupled_spectrum() {
        let p = SystemParams {
            g: 0.0,
            epsilon: 0.0,
            ..params()
        };
        let h = build_hamiltonian(&p, &config(Frame::Lab, Coupling::Full)).unwrap();
        let m = h.at(0.0);
        let d = m.nrows();
        let dm = DMatrix::from_fn(d, d, |i, j| m[[i, j]]);
        let mut got: Vec<f64> = dm.symmetric_eigenvalues().iter().copied().collect();
        got.sort_by(f64::total_cmp);
        let mut want: Vec<f64> = (0..5)
            .flat_map(|n| [-3.0 + 5.0 * n as f64, 3.0 + 5.0 * n as f64])
            .collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        for (frame, coupling) in [
            (Frame::Lab, Coupling::Full),
            (Frame::Lab, Coupling::Rwa),
            (Frame::Rotating, Coupling::Rwa),
        ] {
            let h = build_hamiltonian(&params(), &config(frame, coupling)).unwrap();
            assert_eq!(hermiticity_error(&h.at(0.0)), 0.0);
            assert!(hermiticity_error(&h.at(0.37)) < 1e-15);
        }
    }

    #[test]
    fn rwa_conserves_excitations() {
        let p = SystemParams {
            epsilon: 0.0,
            ..params()
        };
        let h = build_hamiltonian(&p, &config(Frame::Lab, Coupling::Rwa)).unwrap();
        let ops = h.operators();
        let excitations = &ops.number + &ops.sigma_minus.dot(&ops.sigma_plus);
        let m = h.at(0.0);
        let comm = m.dot(&excitations) - excitations.dot(&m);
        let worst = comm.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-12);

        let full = build_hamiltonian(&p, &config(Frame::Lab, Coupling::Full)).unwrap().at(0.0);
        let comm = full.dot(&excitations) - excitations.dot(&full);
        assert!(comm.iter().map(|z| z.norm()).fold(0.0, f64::max) > 0.1);
    }

    #[test]
    fn lab_drive_coefficient() {
        let drive = LabDrive {
            epsilon: 2.0,
            omega_d: 3.0,
        };
        assert!((drive.coefficient(0.0) - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        let t = std::f64::consts::PI / 6.0;
        assert!((drive.coefficient(t) - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }
}
