//! Frozen values computed independently of this crate, and worked examples.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use qrsim::analytic::{fidelity_curve, photon_number, phi, sigma_z_rate_full, sigma_z_rate_reduced};
use qrsim::model::{QubitSector, SystemParams};
use qrsim::oracle::{fidelity_oracle, sector_photon_number, Coupling, Frame, HilbertSpec, OracleConfig};

fn suite(omega_d: f64) -> SystemParams {
    SystemParams {
        omega_q: 5400.0,
        omega_r: 5000.0,
        omega_d,
        g: 20.0,
        kappa: 1.0,
        epsilon: FRAC_1_SQRT_2,
        n_th: 0.2,
        temperature_ratio: None,
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

#[test]
fn rate_equations_against_symbolic_evaluation() {
    // exact rational evaluation of the printed rate equations at t = 0.1,
    // 20 significant digits
    let table = [
        (5001.0, -1.0, 9.105_539_917_598_009, 9.088_301_604_232_693),
        (5001.0, 1.0, -0.907_417_778_649_688_4, -0.904_500_526_890_745_2),
        (5003.0, -1.0, 3.750_684_085_515_220_4, 3.744_594_778_213_461_7),
        (5003.0, 1.0, -0.658_259_003_496_866_7, -0.656_637_134_920_626_9),
    ];
    for (omega_d, s, full, reduced) in table {
        let p = suite(omega_d);
        let got_full = sigma_z_rate_full(s, 0.1, &p);
        let got_reduced = sigma_z_rate_reduced(s, 0.1, &p);
        assert!(close(got_full, full, 1e-11), "{omega_d} {s}: {got_full} vs {full}");
        assert!(close(got_reduced, reduced, 1e-11), "{omega_d} {s}: {got_reduced} vs {reduced}");
    }
}

#[test]
fn phi_plus_for_excited_resonant_weak_drive() {
    // χ = 1, κ = 0.1, ε = 0.05, n_th = 0, drive at ω_r + χ
    let p = SystemParams {
        omega_q: 5100.0,
        omega_r: 5000.0,
        omega_d: 5001.0,
        g: 10.0,
        kappa: 0.1,
        epsilon: 0.05,
        n_th: 0.0,
        temperature_ratio: None,
    };
    let lorentz = 0.0025 / (4.0 + 0.0025);
    let expected = 0.5 + lorentz + 40.0 * lorentz;
    assert!((phi(QubitSector::Ground, &p) - expected).abs() < 1e-14);
    assert!((phi(QubitSector::Ground, &p) - 0.525_60).abs() < 1e-5);
}

#[test]
fn asymptotic_fidelity_example() {
    // g/ω_qr = 0.1 and n_r^b = 4 (thermal only)
    let p = SystemParams {
        omega_q: 1100.0,
        omega_r: 1000.0,
        omega_d: 1000.0,
        g: 10.0,
        kappa: 1.0,
        epsilon: 0.0,
        n_th: 4.0,
        temperature_ratio: None,
    };
    let tau = 2.0 * PI * 1e3 / 100.0;
    assert!((fidelity_curve(tau, &p).unwrap() - 0.95).abs() < 1e-4);
}

#[test]
fn drive_lorentzian_full_width_is_kappa() {
    let p = suite(5000.0);
    let n_drive = |w: f64| photon_number(&SystemParams { omega_d: w, ..p }, QubitSector::Ground, false) - p.n_th;
    let peak = n_drive(4999.0);
    let step = 1e-4;
    let crossing = |dir: f64| {
        let mut w = 4999.0;
        while n_drive(w) > 0.5 * peak {
            w += dir * step;
        }
        w
    };
    let fwhm = crossing(1.0) - crossing(-1.0);
    assert!((fwhm / p.kappa - 1.0).abs() < 0.02, "{fwhm}");
}

#[test]
fn oracle_fidelity_falls_with_drive() {
    let oracle = OracleConfig {
        hilbert: HilbertSpec::new(10).unwrap(),
        ..OracleConfig::default()
    };
    let f: Vec<f64> = [0.3, 0.6, 0.9]
        .iter()
        .map(|&eps| fidelity_oracle(1.0, &SystemParams { epsilon: eps, ..suite(5001.5) }, &oracle).unwrap())
        .collect();
    assert!(f[0] > f[1] && f[1] > f[2], "{f:?}");
}

#[test]
fn full_and_rwa_coupling_agree_on_photon_number() {
    // a scaled-down dispersive system so the lab frame stays cheap
    let p = SystemParams {
        omega_q: 60.0,
        omega_r: 50.0,
        omega_d: 50.1,
        g: 1.0,
        kappa: 0.1,
        epsilon: 0.05,
        n_th: 0.05,
        temperature_ratio: None,
    };
    let spec = HilbertSpec::new(6).unwrap();
    let rwa = OracleConfig {
        hilbert: spec,
        ..OracleConfig::default()
    };
    let full = OracleConfig {
        frame: Frame::Lab,
        coupling: Coupling::Full,
        hilbert: spec,
        ..OracleConfig::default()
    };
    for sector in QubitSector::BOTH {
        let a = sector_photon_number(&p, &rwa, sector, 60.0).unwrap().photon_number;
        let b = sector_photon_number(&p, &full, sector, 60.0).unwrap().photon_number;
        assert!(((b - a) / a).abs() <= 0.05, "{sector:?}: rwa {a}, full {b}");
    }
}
