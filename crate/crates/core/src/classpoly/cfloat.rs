//! Arbitrary-precision complex floating-point arithmetic.
//!
//! A thin complex layer over binary big-floats.  Every operation takes the
//! working precision in bits explicitly; precision is never silently
//! downgraded.  Also houses the bridges between exact integers and floats:
//! integer-to-float injection, guarded round-to-nearest-integer extraction,
//! and the floored `k·ln N` window arithmetic used by the basis search.

use astro_float::{BigFloat, Consts, Exponent, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

/// Rounding mode used throughout: round to nearest, ties to even.
pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// A complex number with explicitly tracked precision.
#[derive(Clone, Debug)]
pub(crate) struct Cx {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Cx {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Cx { re, im }
    }

    pub fn from_u64(x: u64, prec: usize) -> Self {
        Cx {
            re: BigFloat::from_u64(x, prec),
            im: BigFloat::from_u64(0, prec),
        }
    }

    pub fn one(prec: usize) -> Self {
        Self::from_u64(1, prec)
    }

    pub fn add(&self, rhs: &Self, p: usize) -> Self {
        Cx {
            re: self.re.add(&rhs.re, p, RM),
            im: self.im.add(&rhs.im, p, RM),
        }
    }

    pub fn sub(&self, rhs: &Self, p: usize) -> Self {
        Cx {
            re: self.re.sub(&rhs.re, p, RM),
            im: self.im.sub(&rhs.im, p, RM),
        }
    }

    pub fn mul(&self, rhs: &Self, p: usize) -> Self {
        let ac = self.re.mul(&rhs.re, p, RM);
        let bd = self.im.mul(&rhs.im, p, RM);
        let ad = self.re.mul(&rhs.im, p, RM);
        let bc = self.im.mul(&rhs.re, p, RM);
        Cx {
            re: ac.sub(&bd, p, RM),
            im: ad.add(&bc, p, RM),
        }
    }

    pub fn div(&self, rhs: &Self, p: usize) -> Self {
        let den = rhs
            .re
            .mul(&rhs.re, p, RM)
            .add(&rhs.im.mul(&rhs.im, p, RM), p, RM);
        let ac = self.re.mul(&rhs.re, p, RM);
        let bd = self.im.mul(&rhs.im, p, RM);
        let bc = self.im.mul(&rhs.re, p, RM);
        let ad = self.re.mul(&rhs.im, p, RM);
        Cx {
            re: ac.add(&bd, p, RM).div(&den, p, RM),
            im: bc.sub(&ad, p, RM).div(&den, p, RM),
        }
    }

    pub fn neg(&self) -> Self {
        Cx {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    /// Integer power by square-and-multiply.
    pub fn powi(&self, mut e: u32, p: usize) -> Self {
        let mut result = Cx::one(p);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, p);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, p);
            }
        }
        result
    }

    /// Principal square root, valid on the right half-plane `Re z > 0`.
    ///
    /// Used only by the eta transformation identities in tests.
    #[cfg(test)]
    pub fn sqrt_right_half(&self, p: usize, _cc: &mut Consts) -> Self {
        let mag = self
            .re
            .mul(&self.re, p, RM)
            .add(&self.im.mul(&self.im, p, RM), p, RM)
            .sqrt(p, RM);
        let two = BigFloat::from_u64(2, p);
        let u = mag.add(&self.re, p, RM).div(&two, p, RM).sqrt(p, RM);
        let v = self.im.div(&u.mul(&two, p, RM), p, RM);
        Cx { re: u, im: v }
    }
}

/// Base-2 exponent of a big-float (`value = ±0.mantissa · 2^e`), or
/// `i64::MIN` for zero.  A magnitude proxy for convergence checks.
pub(crate) fn exponent_of(x: &BigFloat) -> i64 {
    if x.is_zero() {
        return i64::MIN;
    }
    match x.as_raw_parts() {
        Some((_, _, _, e, _)) => e as i64,
        None => i64::MIN,
    }
}

/// Injects an exact non-negative integer into a big-float, keeping every bit.
pub(crate) fn biguint_to_bigfloat(u: &BigUint) -> BigFloat {
    if u.is_zero() {
        return BigFloat::from_u64(0, 64);
    }
    let bit_len = u.bits();
    let top = bit_len % 64;
    let normalized = if top == 0 { u.clone() } else { u << (64 - top) };
    let words: Vec<Word> = normalized.to_u64_digits();
    BigFloat::from_words(&words, Sign::Pos, bit_len as Exponent)
}

/// Injects an exact signed integer into a big-float.
pub(crate) fn bigint_to_bigfloat(x: &BigInt) -> BigFloat {
    let f = biguint_to_bigfloat(x.magnitude());
    if x.sign() == num_bigint::Sign::Minus {
        f.neg()
    } else {
        f
    }
}

/// Rounds to the nearest integer, reporting whether the value was safely
/// close to it.
///
/// Returns `(n, margin_ok)` where `margin_ok` is true iff the distance from
/// the float to `n` is below 1/4.  Exact ties round half-up in magnitude and
/// are reported as bad margins, which triggers precision escalation in the
/// callers.
pub(crate) fn round_nearest(x: &BigFloat) -> (BigInt, bool) {
    if x.is_zero() {
        return (BigInt::zero(), true);
    }
    let (words, _prec, sign, e, _inexact) = x
        .as_raw_parts()
        .expect("finite float required for rounding");
    let m = BigUint::from_bytes_le(
        &words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .collect::<Vec<u8>>(),
    );
    let total_bits = 64 * words.len() as i64;
    let e = e as i64;

    let (magnitude, margin_ok) = if e >= total_bits {
        ((&m) << ((e - total_bits) as u64), true)
    } else {
        let shift = (total_bits - e) as u64;
        let q = &m >> shift;
        let f = &m - (&q << shift);
        let four_f = &f << 2u8;
        let pow: BigUint = BigUint::from(1u8) << shift;
        let three_pow = &pow * 3u8;
        let ok = four_f < pow || four_f > three_pow;
        let two_f = &f << 1u8;
        let rounded = if two_f >= pow { q + 1u8 } else { q };
        (rounded, ok)
    };

    let n = if sign == Sign::Neg {
        -BigInt::from(magnitude)
    } else {
        BigInt::from(magnitude)
    };
    (n, margin_ok)
}

/// Working precision for the window arithmetic below; the quantities are a
/// few hundred thousand at most, so 192 bits leaves ~2^-170 slack around any
/// integer boundary.
const LN_PRECISION: usize = 192;

/// `⌊k · ln n⌋` for a positive integer `n`.
pub(crate) fn floor_k_ln_n(n: &BigUint, k: u64) -> u64 {
    let mut cc = Consts::new().expect("constants cache");
    let ln = biguint_to_bigfloat(n).ln(LN_PRECISION, RM, &mut cc);
    let prod = ln.mul(&BigFloat::from_u64(k, LN_PRECISION), LN_PRECISION, RM);
    bigfloat_floor_to_u64(&prod)
}

/// `⌊(k · ln n)²⌋` for a positive integer `n`.
pub(crate) fn floor_square_k_ln_n(n: &BigUint, k: u64) -> u64 {
    let mut cc = Consts::new().expect("constants cache");
    let ln = biguint_to_bigfloat(n).ln(LN_PRECISION, RM, &mut cc);
    let prod = ln.mul(&BigFloat::from_u64(k, LN_PRECISION), LN_PRECISION, RM);
    let sq = prod.mul(&prod, LN_PRECISION, RM);
    bigfloat_floor_to_u64(&sq)
}

/// Floor of a non-negative float as a machine word.
fn bigfloat_floor_to_u64(x: &BigFloat) -> u64 {
    let fl = x.floor();
    let (n, _) = round_nearest(&fl);
    assert!(n.sign() != num_bigint::Sign::Minus, "negative window value");
    use num_traits::ToPrimitive;
    n.to_u64().expect("window value exceeds u64")
}
