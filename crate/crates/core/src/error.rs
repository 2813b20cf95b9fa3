//! Error taxonomy shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Static model parameters violate a structural requirement
    /// (class ordering, weight normalization, exchange amount vs. class gaps, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Enforcement parameters outside the admissible box
    /// (audit fraction in [0,1], penalty multiplier in (1,2], top tax rate <= 0.5).
    #[error("constraint violation: {0}")]
    Constraint(String),

    /// A population state fails its invariants (negativity, normalization).
    #[error("invalid population state: {0}")]
    State(String),

    /// An input has the wrong length for the model dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The integrator detected conservation drift or negativity beyond bounds.
    #[error("integration failure: {0}")]
    Integration(String),

    /// A metric is undefined for the given state (e.g. zero total income).
    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    /// Sector has no population mass, so its mean income is undefined.
    #[error("empty sector at index {0}")]
    EmptySector(usize),

    /// Least-squares system is rank deficient or otherwise unusable.
    #[error("fit error: {0}")]
    Fit(String),

    /// Surface inversion denominator is (numerically) zero.
    #[error("singular inversion: {0}")]
    SingularInversion(String),

    /// Command-line / file-format usage errors.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
