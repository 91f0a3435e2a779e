//! Dense univariate polynomial arithmetic over F_p: powering X^p modulo a
//! polynomial, gcd, equal-degree splitting, and root extraction.
//!
//! Polynomials are coefficient vectors in ascending degree with entries
//! reduced mod p; the zero polynomial is the empty vector.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;

use crate::arith::invert_mod;
use crate::error::{Error, Result};

type Poly = Vec<BigUint>;

fn trim(mut v: Poly) -> Poly {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn degree(v: &Poly) -> usize {
    debug_assert!(v.last().map_or(true, |c| !c.is_zero()));
    v.len().saturating_sub(1)
}

/// Reduces integer coefficients into F_p.
pub(crate) fn reduce_coeffs(coeffs: &[BigInt], p: &BigUint) -> Poly {
    let p_int = BigInt::from(p.clone());
    trim(
        coeffs
            .iter()
            .map(|c| c.mod_floor(&p_int).to_biguint().unwrap())
            .collect(),
    )
}

fn sub_mod(a: &BigUint, b: &BigUint, p: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn mul_poly(a: &Poly, b: &Poly, p: &BigUint) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = (&out[i + j] + ai * bj) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn rem_by_monic(mut a: Poly, m: &Poly, p: &BigUint) -> Poly {
    debug_assert!(m.last().is_some_and(|c| c.is_one()));
    let dm = degree(m);
    while a.len() > dm {
        let lead = a.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let off = a.len() - dm;
        for (k, mk) in m.iter().take(dm).enumerate() {
            let t = (mk * &lead) % p;
            a[off + k] = sub_mod(&a[off + k], &t, p);
        }
    }
    trim(a)
}

fn mulmod(a: &Poly, b: &Poly, m: &Poly, p: &BigUint) -> Poly {
    rem_by_monic(mul_poly(a, b, p), m, p)
}

/// Scales a nonzero polynomial to be monic.
fn make_monic(v: Poly, p: &BigUint) -> Poly {
    match v.last() {
        None => v,
        Some(lead) if lead.is_one() => v,
        Some(lead) => {
            let inv = invert_mod(lead, p).expect("leading coefficient invertible mod prime");
            trim(v.iter().map(|c| (c * &inv) % p).collect())
        }
    }
}

/// Monic gcd over F_p.
fn gcd_poly(mut a: Poly, mut b: Poly, p: &BigUint) -> Poly {
    a = make_monic(trim(a), p);
    b = make_monic(trim(b), p);
    while !b.is_empty() {
        let r = rem_by_monic(a, &b, p);
        a = std::mem::replace(&mut b, make_monic(r, p));
    }
    a
}

/// X^p modulo the monic polynomial `m`, by left-to-right binary powering of
/// the exponent; the multiply-by-X steps are single reduction shifts.
fn x_pow_p_mod(m: &Poly, p: &BigUint) -> Poly {
    let x: Poly = vec![BigUint::zero(), BigUint::one()];
    if degree(m) <= 1 {
        // X ≡ −m₀ (mod m) for linear m.
        return rem_by_monic(x, m, p);
    }
    let bits = p.bits();
    let mut acc = x.clone();
    for i in (0..bits - 1).rev() {
        acc = mulmod(&acc, &acc, m, p);
        if p.bit(i) {
            let mut shifted = Vec::with_capacity(acc.len() + 1);
            shifted.push(BigUint::zero());
            shifted.extend(acc);
            acc = rem_by_monic(shifted, m, p);
        }
    }
    acc
}

/// (base)^e modulo the monic polynomial `m`.
fn pow_mod(base: &Poly, e: &BigUint, m: &Poly, p: &BigUint) -> Poly {
    let mut acc: Poly = vec![BigUint::one()];
    if e.is_zero() {
        return acc;
    }
    let base = rem_by_monic(base.clone(), m, p);
    for i in (0..e.bits()).rev() {
        acc = mulmod(&acc, &acc, m, p);
        if e.bit(i) {
            acc = mulmod(&acc, &base, m, p);
        }
    }
    acc
}

/// True iff the monic integer polynomial splits into distinct linear factors
/// mod p, i.e. gcd(X^p − X, f) = f, tested as X^p ≡ X (mod f, p).
pub(crate) fn splits_completely(coeffs: &[BigInt], p: &BigUint) -> bool {
    let f = make_monic(reduce_coeffs(coeffs, p), p);
    if f.len() < 2 {
        return false;
    }
    // A repeated-root polynomial divides X^p − X only if squarefree, and the
    // congruence test covers that automatically.
    let x: Poly = vec![BigUint::zero(), BigUint::one()];
    x_pow_p_mod(&f, p) == rem_by_monic(x, &f, p)
}

/// Finds one root of the integer polynomial mod p: gcd(X^p − X, f) isolates
/// the linear-factor part, then seeded equal-degree splitting cuts it down
/// to a single linear factor.  Deterministic for a given seed.
pub(crate) fn find_root(coeffs: &[BigInt], p: &BigUint, seed: u64) -> Result<BigUint> {
    let f = make_monic(reduce_coeffs(coeffs, p), p);
    if f.len() < 2 {
        return Err(Error::NoRootModP);
    }
    let x: Poly = vec![BigUint::zero(), BigUint::one()];
    let mut g = if degree(&f) == 1 {
        f.clone()
    } else {
        let xp = x_pow_p_mod(&f, p);
        let diff = poly_sub(&xp, &x, p);
        let g = gcd_poly(diff, f.clone(), p);
        if degree(&g) == 0 || g.is_empty() {
            return Err(Error::NoRootModP);
        }
        g
    };

    // Equal-degree splitting: g is now a product of distinct linear factors.
    // (X + a)^((p−1)/2) − 1 annihilates roots r with a + r a nonzero square,
    // so gcd cuts g roughly in half for random a.
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let half = (p - BigUint::one()) >> 1u8;
    while degree(&g) > 1 {
        let a = rand_sample_below(&mut rng, p);
        let shift: Poly = vec![a, BigUint::one()];
        let h = pow_mod(&shift, &half, &g, p);
        let h1 = poly_sub(&h, &vec![BigUint::one()], p);
        let d = gcd_poly(h1, g.clone(), p);
        let dd = degree(&d);
        if d.is_empty() || dd == 0 || dd == degree(&g) {
            continue;
        }
        // Take the smaller factor; the cofactor would do equally well.
        g = if dd <= degree(&g) - dd {
            d
        } else {
            quotient_by_monic(&g, &d, p)
        };
    }
    let root = sub_mod(&BigUint::zero(), &g[0], p) % p;

    // Unconditional check against the original coefficients.
    let p_int = BigInt::from(p.clone());
    let r_int = BigInt::from(root.clone());
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * &r_int + c).mod_floor(&p_int);
    }
    assert!(acc.is_zero(), "root extraction produced a non-root");
    Ok(root)
}

fn poly_sub(a: &Poly, b: &Poly, p: &BigUint) -> Poly {
    let n = a.len().max(b.len());
    let zero = BigUint::zero();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let ai = a.get(i).unwrap_or(&zero);
        let bi = b.get(i).unwrap_or(&zero);
        out.push(sub_mod(ai, bi, p));
    }
    trim(out)
}

/// Exact quotient a / d for monic d dividing a.
fn quotient_by_monic(a: &Poly, d: &Poly, p: &BigUint) -> Poly {
    let mut rem = a.clone();
    let dd = degree(d);
    let mut q = vec![BigUint::zero(); a.len() - dd];
    while rem.len() > dd {
        let lead = rem.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let off = rem.len() - dd;
        q[off] = lead.clone();
        for (k, mk) in d.iter().take(dd).enumerate() {
            let t = (mk * &lead) % p;
            rem[off + k] = sub_mod(&rem[off + k], &t, p);
        }
    }
    debug_assert!(trim(rem).is_empty(), "division was not exact");
    trim(q)
}

fn rand_sample_below(rng: &mut rand_chacha::ChaCha20Rng, p: &BigUint) -> BigUint {
    use num_bigint::RandBigInt;
    rng.gen_biguint_below(p)
}
