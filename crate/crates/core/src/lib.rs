//! Simulator for a coupled parabolic-elliptic system on the unit interval
//! under sliding-mode boundary control.
//!
//! The parabolic state `u` evolves by diffusion, linear reaction and a
//! coupling to an elliptic field `v` that is slaved to `u` through a
//! quasi-steady constraint with homogeneous Neumann conditions. Actuation
//! and a bounded matched disturbance both enter through the Neumann flux
//! at the right endpoint. The crate provides
//!
//! - spatial discretization, quadrature and norms ([`grid`]),
//! - the tridiagonal quasi-steady solve and an independent cosine-series
//!   reference for it ([`elliptic`]),
//! - closed-form modal analysis of the uncontrolled dynamics ([`spectral`]),
//! - the sliding variable, sign regularizations, boundary control laws and
//!   gain certificates ([`control`]),
//! - bounded disturbance generators ([`disturbance`]),
//! - IMEX (Crank-Nicolson + explicit coupling) time integration ([`sim`]),
//! - trace post-processing: rate fits and certificate audits
//!   ([`diagnostics`]).

pub mod control;
pub mod diagnostics;
pub mod disturbance;
pub mod elliptic;
mod error;
pub mod grid;
pub mod params;
pub mod sim;
pub mod spectral;

pub use control::{
    gain_certificate, ControlLaw, ControlSample, ControllerConfig, GainCertificate, SignMode,
    TestFunction, TestFunctionShape,
};
pub use diagnostics::{audit_certificate, fit_rate, AuditReport, CertificateInputs, RateFit, TraceSeries};
pub use disturbance::DisturbanceModel;
pub use elliptic::{cosine_series_response, mode_gain, EllipticSystem};
pub use error::Error;
pub use grid::{Field, Grid, MIN_INTERVALS};
pub use params::PhysicalParams;
pub use sim::{
    detect_reaching, run, InitialCondition, SimConfig, SimState, SimTrace, Simulator, Snapshot,
};
pub use spectral::{eigenvalue, modal_report, mode_solution, ModalReport, DEFAULT_MODE_COUNT};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
