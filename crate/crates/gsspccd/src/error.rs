use num_bigint::BigUint;

/// Errors produced by the library.
///
/// Verification operations never return an error: they report `false` (or a
/// reject reason) instead. Errors are reserved for misuse of an operation,
/// exhausted randomized searches, and file handling.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An inverse was requested for a value not coprime to the modulus.
    /// Carries the offending gcd; a non-trivial gcd of a residue with an
    /// RSA modulus is a leaked factor.
    #[error("not invertible: gcd with modulus is {gcd}")]
    NotInvertible { gcd: BigUint },

    /// A bounded randomized search (prime generation, tuple sampling)
    /// exhausted its retry budget.
    #[error("generation failed: {0}")]
    GenerationFailed(String),

    /// The member id is already present in the registry, or a forced tuple
    /// collides with a registered one. Each member holds exactly one
    /// credential.
    #[error("uniqueness violation: {0}")]
    Uniqueness(String),

    /// Witness extraction from two transcripts is not possible for these
    /// challenges (the challenge gap shares a factor with the exponent).
    #[error("extraction infeasible: {0}")]
    ExtractionInfeasible(String),

    /// A confirming proof was requested with a credential whose public
    /// tuple differs from the contested signature's tuple.
    #[error("credential does not match the contested signature")]
    NotTheSigner,

    /// A denying proof was requested but the prover's value coincides with
    /// the contested one; only the true signer is in that position.
    #[error("cannot deny: {0}")]
    CannotDeny(String),

    /// A commitment bundle contains values outside the group.
    #[error("malformed bundle: {0}")]
    MalformedBundle(String),

    /// A file did not match its expected canonical format.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
