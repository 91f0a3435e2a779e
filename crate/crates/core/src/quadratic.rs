//! Imaginary quadratic discriminants, reduced binary quadratic forms, class
//! numbers, the good-prime basis used by the fixed-order search, and the
//! modified Cornacchia solver for x² − Dy² = 4N.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{is_prime_u64, kronecker, sqrt_mod_prime};
use crate::classpoly::cfloat::floor_k_ln_n;
use crate::error::{Error, Result};

/// A reduced primitive positive-definite binary quadratic form ax² + bxy + cy².
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadraticForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }
}

/// Panics unless `d` is a negative discriminant (d < 0, d ≡ 0 or 1 mod 4).
fn assert_discriminant(d: i64) {
    assert!(d < 0, "discriminant must be negative, got {d}");
    let r = d.rem_euclid(4);
    assert!(r == 0 || r == 1, "{d} is not congruent to 0 or 1 mod 4");
}

/// Whether `d` is a fundamental discriminant (the discriminant of the
/// maximal order of an imaginary quadratic field).
pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree((-d) as u64),
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            (r == 2 || r == 3) && is_squarefree((-m) as u64)
        }
        _ => false,
    }
}

/// Whether `d` qualifies for the fixed-order search: negative and ≡ 5 mod 8.
pub fn is_algorithm_eligible(d: i64) -> bool {
    d < 0 && d.rem_euclid(8) == 5
}

fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut f = 2u64;
    while f * f <= m {
        if m % f == 0 {
            m /= f;
            if m % f == 0 {
                return false;
            }
        }
        f += 1;
    }
    true
}

/// All reduced primitive forms of discriminant `d`, sorted lexicographically
/// by (a, b).  The principal form comes first.
///
/// A form (a, b, c) is reduced when |b| ≤ a ≤ c with b ≥ 0 whenever
/// |b| = a or a = c, and primitive when gcd(a, b, c) = 1.
pub fn reduced_forms(d: i64) -> Vec<QuadraticForm> {
    assert_discriminant(d);
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        // b ranges over −a < b ≤ a with b ≡ d (mod 2); b = −a is excluded
        // because (a, −a, c) reduces to (a, a, c).
        let mut b = -a + 1;
        if (b - d).rem_euclid(2) != 0 {
            b += 1;
        }
        while b <= a {
            let num = b * b - d;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                let edge = b.abs() == a || a == c;
                if c >= a && (!edge || b >= 0) && gcd3(a, b, c) == 1 {
                    out.push(QuadraticForm { a, b, c });
                }
            }
            b += 2;
        }
        a += 1;
    }
    // Iteration order is already lexicographic in (a, b).
    out
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    a.unsigned_abs()
        .gcd(&b.unsigned_abs())
        .gcd(&c.unsigned_abs()) as i64
}

/// The form class number h(d) = |Pic(O_d)|.
pub fn class_number(d: i64) -> usize {
    reduced_forms(d).len()
}

/// One row of the good-prime table: a small prime p with (N/p) = 1,
/// its signed companion p* = (−1)^((p−1)/2)·p, and a square root of
/// p* modulo N.
#[derive(Clone, Debug)]
pub struct BasisEntry {
    pub p: u64,
    pub p_star: i64,
    pub sqrt_p_star_mod_n: BigUint,
}

/// Builds the basis rows for round `r`: every odd prime in the window
/// (⌊r·ln N⌋, ⌊(r+1)·ln N⌋] with (N/p) = 1, each with a verified square
/// root of p* mod N.  Successive rounds partition the primes, so no prime
/// appears twice across rounds.
pub fn build_basis_round(n: &BigUint, r: u32) -> Vec<BasisEntry> {
    assert!(n.is_odd() && *n > BigUint::from(5u8), "modulus must be an odd prime > 5");
    let lo = floor_k_ln_n(n, r as u64);
    let hi = floor_k_ln_n(n, r as u64 + 1);
    let n_int = BigInt::from(n.clone());
    let mut out = Vec::new();
    for p in (lo + 1)..=hi {
        if p < 3 || p % 2 == 0 || !is_prime_u64(p) {
            continue;
        }
        if kronecker(&n_int, &BigInt::from(p)) != 1 {
            continue;
        }
        let p_star: i64 = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        let a = BigInt::from(p_star).mod_floor(&n_int).to_biguint().unwrap();
        // Quadratic reciprocity gives (p*/N) = (N/p) = 1, so for prime N the
        // square root always exists.
        let root = sqrt_mod_prime(&a, n, 0)
            .expect("p* is a quadratic residue mod N by reciprocity");
        out.push(BasisEntry {
            p,
            p_star,
            sqrt_p_star_mod_n: root,
        });
    }
    out
}

/// A candidate discriminant assembled from basis rows: D is the product of
/// the p* values at `indices` (positions into the basis table), negative,
/// ≡ 5 mod 8, and of absolute value below the round's bound.
///
/// The square root of D mod N is not stored — candidate lists can run to
/// hundreds of thousands of entries against thousand-digit moduli — but is
/// recovered on demand by [`candidate_sqrt`] from the referenced rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantCandidate {
    pub d: i64,
    pub indices: Vec<u16>,
}

/// Enumerates every product of distinct p* values from `basis` that is
/// negative, ≡ 5 mod 8, and of absolute value strictly below `bound`,
/// sorted by increasing |D|.  Ties are impossible: the products are
/// squarefree with distinct factorizations.
pub fn discriminant_candidates(basis: &[BasisEntry], bound: u64) -> Vec<DiscriminantCandidate> {
    assert!(
        basis.len() <= u16::MAX as usize,
        "basis table exceeds index range"
    );
    let mut out = Vec::new();
    let mut stack: Vec<u16> = Vec::new();
    descend(basis, bound, 0, 1, false, &mut stack, &mut out);
    out.sort_by_key(|c| -c.d);
    out
}

fn descend(
    basis: &[BasisEntry],
    bound: u64,
    start: usize,
    prod_abs: u64,
    negative: bool,
    stack: &mut Vec<u16>,
    out: &mut Vec<DiscriminantCandidate>,
) {
    for i in start..basis.len() {
        let p = basis[i].p;
        // Basis rows are sorted by p across rounds, so once the product
        // bound is exceeded every later branch is too.
        if p > (bound - 1) / prod_abs {
            break;
        }
        let prod = prod_abs * p;
        let neg = negative != (basis[i].p_star < 0);
        stack.push(i as u16);
        if neg && prod % 8 == 3 {
            out.push(DiscriminantCandidate {
                d: -(prod as i64),
                indices: stack.clone(),
            });
        }
        descend(basis, bound, i + 1, prod, neg, stack, out);
        stack.pop();
    }
}

/// The square root of `cand.d` mod `n`: the product of the stored square
/// roots of the candidate's basis rows.
pub fn candidate_sqrt(basis: &[BasisEntry], cand: &DiscriminantCandidate, n: &BigUint) -> BigUint {
    let mut acc = BigUint::one();
    for &i in &cand.indices {
        acc = (acc * &basis[i as usize].sqrt_p_star_mod_n) % n;
    }
    acc
}

/// A solution of x² − Dy² = 4N with x, y > 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornacchiaSolution {
    pub x: BigUint,
    pub y: BigUint,
}

/// Modified Cornacchia: finds positive x, y with x² − D·y² = 4N, given a
/// square root of D mod N.  Returns `None` when no such solution exists
/// (unique when D < −4).
///
/// The witness is checked first.  A wrong root while D is a residue mod N is
/// a caller bug and signals `BadWitness`; when D is a non-residue no
/// solution exists at all, so the answer is honestly `None`.
pub fn cornacchia(
    d: i64,
    n: &BigUint,
    sqrt_d_mod_n: &BigUint,
) -> Result<Option<CornacchiaSolution>> {
    assert!(d < 0, "discriminant must be negative, got {d}");
    assert!(n.is_odd() && *n >= BigUint::from(3u8), "modulus must be odd and >= 3");
    let n_int = BigInt::from(n.clone());
    let d_mod_n = BigInt::from(d).mod_floor(&n_int).to_biguint().unwrap();
    if sqrt_d_mod_n >= n || (sqrt_d_mod_n * sqrt_d_mod_n) % n != d_mod_n {
        if kronecker(&BigInt::from(d), &n_int) == -1 {
            // D is a non-residue: x² ≡ Dy² (mod N) forces N | x, N | y,
            // which overshoots 4N.  No witness could exist.
            return Ok(None);
        }
        return Err(Error::BadWitness);
    }

    // Lift the root to x₀ ≡ D (mod 2); N odd makes one of {r, N−r} work.
    let x0 = if sqrt_d_mod_n.is_even() == (d % 2 == 0) {
        sqrt_d_mod_n.clone()
    } else {
        n - sqrt_d_mod_n
    };

    let four_n = n << 2u8;
    let limit = four_n.sqrt();
    let b = euclid_first_crossing(n << 1u8, x0, &limit);
    if b.is_zero() {
        // Would force x = 0, excluded by the positivity requirement.
        return Ok(None);
    }
    let t = &four_n - &b * &b;
    let d_abs = BigUint::from(d.unsigned_abs());
    let (q, rem) = t.div_rem(&d_abs);
    if !rem.is_zero() {
        return Ok(None);
    }
    let y = q.sqrt();
    if y.is_zero() || &y * &y != q {
        return Ok(None);
    }
    Ok(Some(CornacchiaSolution { x: b, y }))
}

/// Size below which remainders are cheap enough to divide directly.
const LEHMER_CUTOFF_BITS: u64 = 128;

/// Runs the Euclidean remainder sequence of (a, b) down to the first
/// remainder ≤ `limit` and returns it.  `b` itself counts as the first
/// remainder, matching a descent that starts from (a, b).
///
/// Uses Lehmer's single-precision batching: each iteration simulates many
/// division steps on the top 64 bits of the pair, tracking the transition
/// matrix in machine words, and applies it to the full numbers once.  The
/// simulated steps are genuine remainder-sequence steps, so the batch result
/// (x', y') is a pair of consecutive true remainders.  Crossing detection:
/// if x' ≤ limit the first crossing happened strictly inside the batch and
/// the batch is replayed in single steps from its saved start; if only
/// y' ≤ limit then y' is exactly the first crossing, because its predecessor
/// x' is still above the limit and earlier remainders only grow.
fn euclid_first_crossing(a: BigUint, b: BigUint, limit: &BigUint) -> BigUint {
    let mut x = a;
    let mut y = b;
    while &y > limit {
        if y.bits() <= LEHMER_CUTOFF_BITS {
            while &y > limit {
                let r = &x % &y;
                x = std::mem::replace(&mut y, r);
            }
            break;
        }
        let shift = x.bits() - 64;
        let mut xh = (&x >> shift).to_u64().unwrap() as i128;
        let mut yh = (&y >> shift).to_u64().unwrap() as i128;
        let (mut ma, mut mb, mut mc, mut md): (i128, i128, i128, i128) = (1, 0, 0, 1);
        loop {
            let yc = yh + mc;
            let yd = yh + md;
            if yc <= 0 || yd <= 0 {
                break;
            }
            let q = (xh + ma) / yc;
            if q != (xh + mb) / yd {
                break;
            }
            let (nc, nd) = (ma - q * mc, mb - q * md);
            if nc.abs() > (1 << 62) || nd.abs() > (1 << 62) {
                break;
            }
            let r = xh - q * yh;
            (ma, mb, mc, md) = (mc, md, nc, nd);
            (xh, yh) = (yh, r);
        }
        if mb == 0 {
            // No batched progress possible (oversized quotient); take one
            // exact division step.
            let r = &x % &y;
            x = std::mem::replace(&mut y, r);
        } else {
            let xi = BigInt::from(x.clone());
            let yi = BigInt::from(y.clone());
            let xp = (BigInt::from(ma) * &xi + BigInt::from(mb) * &yi)
                .to_biguint()
                .expect("batched remainder is nonnegative");
            let yp = (BigInt::from(mc) * xi + BigInt::from(md) * yi)
                .to_biguint()
                .expect("batched remainder is nonnegative");
            if &xp <= limit {
                // First crossing is inside the batch: replay it step by step
                // from the saved pair.
                while &y > limit {
                    let r = &x % &y;
                    x = std::mem::replace(&mut y, r);
                }
                break;
            }
            x = xp;
            y = yp;
        }
    }
    y
}

/// Reference implementation of [`euclid_first_crossing`] with one division
/// per step; kept for differential testing.
#[cfg(test)]
fn euclid_first_crossing_plain(a: BigUint, b: BigUint, limit: &BigUint) -> BigUint {
    let mut x = a;
    let mut y = b;
    while &y > limit {
        let r = &x % &y;
        x = std::mem::replace(&mut y, r);
    }
    y
}
