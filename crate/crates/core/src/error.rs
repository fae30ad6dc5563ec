//! Error taxonomy for the simulator.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building states or running the models.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A state or qubit failed its normalization check.
    #[error("state is not normalized: squared norm deviates from 1 by {defect:.3e} (allowed {tol:.1e})")]
    NotNormalized { defect: f64, tol: f64 },

    /// A parameter violated its documented domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A ket outside the enumerated single-excitation basis of the site.
    #[error("ket is outside the site basis: {reason}")]
    BasisDomain { reason: String },

    /// Mixing angle requested with both the drive and the coupling zero.
    #[error("mixing angle is undefined when both the drive and the coupling vanish")]
    DegenerateMixingAngle,

    /// The adaptive integrator underflowed its step size (stiffness or a
    /// discontinuity); carries the time at which progress stalled.
    #[error("integration failed at t = {time:.6e} s: step size underflow (h = {step:.3e})")]
    IntegrationFailure { time: f64, step: f64 },

    /// The adaptive integrator exceeded its step budget.
    #[error("integration exceeded {max_steps} steps at t = {time:.6e} s")]
    StepLimitExceeded { time: f64, max_steps: usize },

    /// Fidelity requested for a configuration with zero success probability.
    #[error("fidelity is undefined: success probability is zero")]
    UndefinedFidelity,

    /// Emission-time statistics requested for a pulse with zero energy.
    #[error("emission time is undefined for a pulse of zero norm")]
    ZeroNormPulse,

    /// Correction requested for a click pattern that heralds no Bell state.
    #[error("no correction is defined for a failure click pattern")]
    NoCorrectionDefined,

    /// A sweep point failed; carries the offending motional phase.
    #[error("sweep point phi_b = {phi_b} failed")]
    SweepPoint {
        phi_b: f64,
        #[source]
        source: Box<Error>,
    },
}
