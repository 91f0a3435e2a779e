//! Error taxonomy shared by every module of the crate.

use num_bigint::BigUint;
use thiserror::Error;

/// Errors surfaced by the library.
///
/// Contract violations that a caller can always rule out statically (a zero
/// Kronecker denominator, a τ in the lower half-plane) are panics, documented
/// per function.  Everything that depends on runtime data — residuosity,
/// primality, search exhaustion — is a typed error below.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The modulus handed to a square-root routine is even, too small, or
    /// behaved like a composite during the computation.
    #[error("modulus is not an odd prime (composite behaviour detected)")]
    BadModulus,

    /// The element has no square root modulo the given prime.
    #[error("value is a quadratic non-residue; no square root exists")]
    NoSquareRoot,

    /// The element is not invertible; the gcd with the modulus is returned
    /// as a factor witness.
    #[error("value is not invertible modulo the modulus (gcd = {gcd})")]
    NonInvertible {
        /// The offending common factor, useful as a factor witness.
        gcd: BigUint,
    },

    /// The square-root witness handed to the Cornacchia solver does not
    /// square to the discriminant modulo `N`.
    #[error("square-root witness does not match the discriminant modulo N")]
    BadWitness,

    /// The requested class invariant is not defined for this discriminant
    /// (e.g. γ₂ requires 3 ∤ D).
    #[error("class invariant not applicable: {0}")]
    InvariantNotApplicable(&'static str),

    /// A value lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// The class polynomial has no root modulo `p`.  In the fixed-order
    /// search this is the "p was not prime after all, continue" signal.
    #[error("polynomial has no root modulo p")]
    NoRootModP,

    /// `j ∈ {0, 1728}`: the generic curve-from-j formula degenerates and a
    /// fixed curve family must be used instead.
    #[error("special j-invariant {0}: use the fixed curve family")]
    SpecialJ(u32),

    /// The claimed group order does not exceed the Hasse-uniqueness
    /// threshold `2N > p + 1 + 2√p`, so a multiple of `N` cannot be told
    /// apart from `N` itself.
    #[error("order is not uniquely determined inside the Hasse interval")]
    AmbiguousHasse,

    /// The input is too large for the naive point-counting oracle.
    #[error("field too large for the naive counting oracle (p ≤ 4·10⁶)")]
    OracleRange,

    /// The search ran out of rounds or candidates without a success.
    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    /// Floating-point precision escalation failed repeatedly.  This is an
    /// internal error and indicates a bug in the precision policy.
    #[error("precision escalation failed; this is an internal error")]
    PrecisionExhausted,

    /// A user-supplied value failed validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
