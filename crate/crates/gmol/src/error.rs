//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Everything that can go wrong while evaluating the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The scattering denominator Ω² − (Δ̃+iΓ₁)(Δ̃−δ̃+iΓ₂) is numerically
    /// zero: the requested point sits on a bound-state pole, not a
    /// scattering state.
    #[error(
        "bound-state pole: |denominator| = {denominator_modulus:.3e} at \
         tilde_delta = {tilde_delta}, tilde_small_delta = {tilde_small_delta}"
    )]
    Pole {
        denominator_modulus: f64,
        tilde_delta: f64,
        tilde_small_delta: f64,
    },

    /// An EIT-limit operation was called on a configuration whose second
    /// effective decay rate is not zero.
    #[error("not in the EIT limit: gamma2 = {gamma2:.3e} exceeds tolerance {tolerance:.1e}")]
    NotInEitLimit { gamma2: f64, tolerance: f64 },

    /// The brute-force linear system could not be factorized.
    #[error("singular linear system in the brute-force solve")]
    SingularSystem,

    /// A spectral feature was found but its width could not be measured
    /// inside the scanned window.
    #[error("feature not resolved: {0}")]
    FeatureNotResolved(String),

    /// Fewer than two transmission dips were found, so no anti-crossing gap
    /// can be reported.
    #[error("anti-crossing gap unresolved: {0}")]
    GapUnresolved(String),

    /// A parameter violates the documented invariants (negative rate or
    /// delay, zero coupling-point count, empty grid, bad bracket, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
