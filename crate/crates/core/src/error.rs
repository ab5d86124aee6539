use crate::sim::SimTrace;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Grid resolution below the minimum needed by the boundary stencils.
    #[error("grid resolution n = {n} is below the minimum of {min} intervals")]
    InvalidResolution { n: usize, min: usize },

    /// Two fields were combined although they live on different grids.
    #[error("fields live on incompatible grids ({left} vs {right} intervals)")]
    IncompatibleGrids { left: usize, right: usize },

    /// A coefficient violates its admissible range.
    #[error("invalid coefficient {name} = {value}: {requirement}")]
    InvalidCoefficient {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A value that must be finite is NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// Disturbance models are defined for t >= 0 only.
    #[error("time argument t = {t} is outside the domain t >= 0")]
    NegativeTime { t: f64 },

    /// A simulation configuration field violates its invariant.
    #[error("invalid configuration: {field}: {message}")]
    InvalidConfig { field: &'static str, message: String },

    /// The time stepper produced non-finite nodal values. `partial` holds
    /// the trace recorded up to the failure when the error is raised by a
    /// full run (step-level detection leaves it empty).
    #[error("solution diverged at t = {time}")]
    Diverged {
        time: f64,
        partial: Option<Box<SimTrace>>,
    },

    /// A rate fit was requested on a window where the series is unusable.
    #[error("series not fittable on the requested window: {reason}")]
    Unfittable { reason: String },

    /// The trace lacks the remainder data (or snapshots to recompute it)
    /// required by a certificate audit.
    #[error("trace lacks controller data required for the audit")]
    InsufficientTrace,
}
