//! Construction of elliptic curves with a prescribed number of points.
//!
//! Given a prime `N`, the library finds a prime `p` and an elliptic curve
//! `E/F_p` with exactly `N` points (fixed-order construction), and, given a
//! digit count `k` and an eligible discriminant `D`, a curve of `k`-digit
//! prime order with complex multiplication by the order of discriminant `D`
//! (fixed-size construction).  Both pipelines rest on the same machinery:
//!
//! * [`arith`] — arbitrary-precision modular arithmetic: Kronecker symbols,
//!   Miller–Rabin, Tonelli–Shanks square roots, modular inverses.
//! * [`quadratic`] — imaginary quadratic discriminants, reduced binary
//!   quadratic forms and class numbers, the good-prime basis with stored
//!   square roots, and the modified Cornacchia solver for `x² − Dy² = 4N`.
//! * [`classpoly`] — arbitrary-precision complex evaluation of the Dedekind
//!   eta function and the modular invariants `f`, `γ₂`, `j`; Hilbert and
//!   `γ₂` class polynomials with guarded integer rounding; root finding and
//!   splitting checks modulo `p`; invariant-to-`j` transport.
//! * [`ec`] — short Weierstrass curves over prime fields: curve-from-`j`,
//!   quadratic/quartic/sextic twists, point arithmetic, order certificates,
//!   and a naive counting oracle for small fields.
//! * [`construct`] — the two end-to-end search pipelines plus certificate
//!   re-validation.
//!
//! All integers are exact (`num-bigint`); all floating-point work tracks its
//! precision explicitly in bits and never silently downgrades it.

pub mod arith;
pub mod classpoly;
pub mod construct;
pub mod ec;
mod error;
pub mod quadratic;

pub use error::{Error, Result};
