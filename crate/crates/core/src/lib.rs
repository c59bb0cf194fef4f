//! Driven, dissipative qubit-resonator simulator.
//!
//! [`analytic`] evaluates the closed-form dispersive results (pulled
//! resonator response, qubit rate equations, measurement fidelity,
//! drive-controlled relaxation). [`oracle`] integrates the full model as a
//! Lindblad master equation on a truncated Fock space and extracts the same
//! observables. [`experiments`] runs declarative sweeps comparing the two and
//! [`cli`] wires them to config files and CSV/JSON output.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
pub use model::{QubitSector, SystemParams, TimeGrid, Trajectory, Warning};
