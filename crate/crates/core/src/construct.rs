//! Curve construction: prescribed order, and prescribed size with a fixed
//! discriminant.
//!
//! [`fixed_order_curve`] answers "give me a curve with exactly N points":
//! it searches discriminants D ≡ 5 (mod 8) assembled from split primes,
//! solves x² − Dy² = 4N by Cornacchia, tests p = N + 1 ± x for primality,
//! and certifies a twist of a curve built from a class-polynomial root
//! mod p.  The search widens in rounds — each round admits larger basis
//! primes and a larger |D| bound — so small class numbers are tried first.
//!
//! [`fixed_size_curve`] fixes the discriminant up front and scans field
//! primes p of about k digits instead: for each p that splits in the order,
//! Cornacchia at p yields the traces of Frobenius realizable with CM by D,
//! and any k-digit prime among the corresponding orders p + 1 ± x (six
//! orders for D = −3, whose extra units contribute ±(x ± 3y)/2) is accepted
//! and certified the same way.
//!
//! Both searches return a self-contained result whose claims are cheap to
//! re-check; [`check_certificate`] does exactly that, without re-running
//! any search, and reports the first broken invariant if tampered with.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::arith::{is_probable_prime, kronecker, next_prime, sqrt_mod_prime};
use crate::classpoly::cfloat::floor_square_k_ln_n;
use crate::classpoly::{
    find_root_mod_p, gamma2_class_poly, hilbert_class_poly, invariant_root_to_j, Invariant,
};
use crate::ec::{
    curve_from_j, enumerate_twists, in_hasse_interval, order_uniquely_determined, try_scalar_mul,
    verify_order, Curve, OrderCertificate, Point,
};
use crate::quadratic::{
    build_basis_round, candidate_sqrt, class_number, cornacchia, discriminant_candidates,
    BasisEntry,
};
use crate::{Error, Result};

/// Miller–Rabin rounds for primality screens inside the searches.
const MR_ROUNDS: u32 = 32;

/// Point draws allowed when certifying one twist.
const CERT_TRIALS: u32 = 8;

/// How a fixed-size search walks the field primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScanMode {
    /// Seeded uniform draws from the window of primes whose entire Hasse
    /// interval has exactly k digits.
    Random,
    /// Deterministic walk: the given start if prime, then successive primes.
    SequentialFrom(BigUint),
}

/// Knobs shared by both searches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchPolicy {
    /// Reject discriminants whose class number is below this.
    pub min_class_number: usize,
    /// Rounds of basis/bound widening before a fixed-order search gives up.
    pub max_rounds: u32,
    /// Prime scan order for fixed-size searches.
    pub scan: ScanMode,
    /// Seed for every randomized choice (Miller–Rabin bases, Tonelli–Shanks,
    /// root finding, certificate point draws, random scans).
    pub seed: u64,
    /// Use the Hilbert class polynomial even when γ₂ is available.
    pub force_j: bool,
    /// Primes examined before a fixed-size search gives up.
    pub max_prime_candidates: usize,
}

impl Default for SearchPolicy {
    fn default() -> Self {
        SearchPolicy {
            min_class_number: 0,
            max_rounds: 32,
            scan: ScanMode::Random,
            seed: 0,
            force_j: false,
            max_prime_candidates: 100_000,
        }
    }
}

/// Outcome of a fixed-order search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedOrderResult {
    /// The prescribed prime order.
    pub n: BigUint,
    /// Field prime: the curve lives over F_p.
    pub p: BigUint,
    /// Discriminant of the CM order, ≡ 5 (mod 8).
    pub d: i64,
    /// Search rounds consumed (1 means the first basis/bound sufficed).
    pub rounds_used: u32,
    /// Basis primes accumulated across the rounds actually run.
    pub basis_primes: Vec<u64>,
    /// Decimal digits of the largest coefficient of the class polynomial
    /// used for D (γ₂ unless `force_j` or 3 | D).
    pub class_poly_digits: usize,
    /// The certified curve.
    pub curve: Curve,
    /// Witness that the curve has exactly `n` points.
    pub certificate: OrderCertificate,
}

/// Outcome of a fixed-size search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedSizeResult {
    /// Requested decimal digit count for the group order.
    pub k: u32,
    /// The fixed discriminant.
    pub d: i64,
    /// Field prime.
    pub p: BigUint,
    /// Certified prime group order with exactly `k` digits.
    pub q: BigUint,
    /// Which member of the trace orbit produced `q`: the orders tried are
    /// p+1+x, p+1−x and, for D = −3, also p+1±(x+3y)/2 and p+1±(x−3y)/2,
    /// indexed in that sequence.
    pub unit_index: u32,
    /// The certified curve.
    pub curve: Curve,
    /// Witness that the curve has exactly `q` points.
    pub certificate: OrderCertificate,
}

/// Either search outcome, for uniform certificate checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    FixedOrder(FixedOrderResult),
    FixedSize(FixedSizeResult),
}

/// First invariant found broken by [`check_certificate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CertificateIssue {
    #[error("claimed order differs from the certificate's order")]
    OrderMismatch,
    #[error("certificate curve differs from the result curve")]
    CurveMismatch,
    #[error("discriminant is not negative or not 5 mod 8")]
    IneligibleDiscriminant,
    #[error("field prime equals the group order")]
    AnomalousPair,
    #[error("group order fails Miller-Rabin")]
    CompositeOrder,
    #[error("field order fails Miller-Rabin")]
    CompositeField,
    #[error("curve is singular or its field order is unusable")]
    BadCurve,
    #[error("group order lies outside the Hasse interval")]
    OutsideHasse,
    #[error("group order does not pin down the curve order uniquely")]
    AmbiguousOrder,
    #[error("witness is not an affine point of the curve")]
    WitnessNotOnCurve,
    #[error("witness is not annihilated by the group order")]
    WrongWitnessOrder,
    #[error("trace fails the norm equation 4p - t^2 = |D| y^2")]
    CmIdentityBroken,
    #[error("group order does not have the requested digit count")]
    WrongDigitCount,
}

/// Hasse interval `[q + 1 − ⌊2√q⌋, q + 1 + ⌊2√q⌋]` (inclusive ends).
pub fn hasse_interval(q: &BigUint) -> (BigUint, BigUint) {
    let s = (q << 2u32).sqrt();
    let mid = q + 1u32;
    (&mid - &s, mid + s)
}

/// A surviving (discriminant, field prime) pair from the cheap stage,
/// ranked by candidate position and sign so the expensive stage visits
/// them in the same order a sequential search would.
struct Hit {
    rank: (usize, u8),
    d: i64,
    p: BigUint,
}

/// Construct a curve with exactly `n` points, `n` a prime larger than 5.
pub fn fixed_order_curve(n: &BigUint, policy: &SearchPolicy) -> Result<FixedOrderResult> {
    if *n <= BigUint::from(5u8) || !is_probable_prime(n, MR_ROUNDS, policy.seed) {
        return Err(Error::InvalidInput(
            "the prescribed order must be a prime larger than 5".into(),
        ));
    }
    let mut basis: Vec<BasisEntry> = Vec::new();
    let mut tried: HashSet<i64> = HashSet::new();
    for round in 0..policy.max_rounds {
        basis.extend(build_basis_round(n, round));
        let bound = floor_square_k_ln_n(n, u64::from(round) + 1);
        let candidates = discriminant_candidates(&basis, bound);
        let fresh: Vec<_> = candidates.iter().filter(|c| !tried.contains(&c.d)).collect();

        // Cheap stage: square root assembly, Cornacchia, and primality of
        // N + 1 ± x.  Independent per candidate, so it runs in parallel;
        // the rank keeps the outcome identical to a sequential scan.
        let staged: Result<Vec<Vec<Hit>>> = fresh
            .par_iter()
            .enumerate()
            .map(|(idx, cand)| {
                let mut out = Vec::new();
                let sq = candidate_sqrt(&basis, cand, n);
                if let Some(sol) = cornacchia(cand.d, n, &sq)? {
                    if class_number(cand.d) >= policy.min_class_number {
                        let mid = n + 1u32;
                        for (sign, p) in [(0u8, &mid + &sol.x), (1u8, &mid - &sol.x)] {
                            if p != *n
                                && p > BigUint::from(3u8)
                                && is_probable_prime(&p, MR_ROUNDS, policy.seed)
                            {
                                out.push(Hit { rank: (idx, sign), d: cand.d, p });
                            }
                        }
                    }
                }
                Ok(out)
            })
            .collect();
        let mut hits: Vec<Hit> = staged?.into_iter().flatten().collect();
        hits.sort_by(|a, b| a.rank.cmp(&b.rank));

        // Expensive stage: class polynomial, root extraction, twist
        // certification.  Sequential — the first certifying hit wins.
        for hit in hits {
            if let Some((curve, certificate, digits)) =
                certify_via_class_poly(n, hit.d, &hit.p, policy)?
            {
                return Ok(FixedOrderResult {
                    n: n.clone(),
                    p: hit.p,
                    d: hit.d,
                    rounds_used: round + 1,
                    basis_primes: basis.iter().map(|b| b.p).collect(),
                    class_poly_digits: digits,
                    curve,
                    certificate,
                });
            }
        }
        for c in candidates {
            tried.insert(c.d);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no certified curve of the prescribed order within {} rounds",
        policy.max_rounds
    )))
}

/// Construct a curve over some prime field whose order is a prime with
/// exactly `k` decimal digits (`k ≥ 3`) and CM by the order of discriminant
/// `d`, which must be negative and ≡ 5 (mod 8).
pub fn fixed_size_curve(k: u32, d: i64, policy: &SearchPolicy) -> Result<FixedSizeResult> {
    if k < 3 {
        return Err(Error::InvalidInput(
            "the digit count must be at least 3".into(),
        ));
    }
    if d >= 0 || d.rem_euclid(8) != 5 {
        return Err(Error::InvalidInput(
            "the discriminant must be negative and congruent to 5 modulo 8".into(),
        ));
    }
    let ten_km1 = BigUint::from(10u8).pow(k - 1);
    let ten_k = BigUint::from(10u8).pow(k);
    // Window of field primes whose whole Hasse interval stays at k digits;
    // the random scan draws from it.  A sequential scan follows the caller's
    // start instead and relies on the per-order digit filter alone.
    let win_lo = &ten_km1 + (&ten_km1 << 2u32).sqrt() + 1u32;
    let win_hi = &ten_k - (&ten_k << 2u32).sqrt() - 2u32;

    let mut rng = ChaCha20Rng::seed_from_u64(policy.seed);
    let mut cursor = match &policy.scan {
        ScanMode::Random => None,
        ScanMode::SequentialFrom(start) => {
            let s = start.max(&BigUint::from(2u8)).clone();
            Some(if is_probable_prime(&s, MR_ROUNDS, policy.seed) {
                s
            } else {
                next_prime(&s)
            })
        }
    };

    let mut examined = 0usize;
    while examined < policy.max_prime_candidates {
        let p = match &mut cursor {
            Some(cur) => {
                let p = cur.clone();
                *cur = next_prime(&p);
                p
            }
            None => {
                let draw = rng.gen_biguint_range(&win_lo, &win_hi);
                let p = if is_probable_prime(&draw, MR_ROUNDS, policy.seed) {
                    draw
                } else {
                    next_prime(&draw)
                };
                if p > win_hi {
                    continue;
                }
                p
            }
        };
        examined += 1;

        if let Some(result) = try_field_prime(k, d, &p, &ten_km1, &ten_k, policy)? {
            return Ok(result);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no {k}-digit prime order with discriminant {d} within {} field primes",
        policy.max_prime_candidates
    )))
}

/// One fixed-size scan step: does the field prime `p` yield a k-digit
/// prime order with CM by `d`?
fn try_field_prime(
    k: u32,
    d: i64,
    p: &BigUint,
    ten_km1: &BigUint,
    ten_k: &BigUint,
    policy: &SearchPolicy,
) -> Result<Option<FixedSizeResult>> {
    let p_int = BigInt::from(p.clone());
    if kronecker(&BigInt::from(d), &p_int) != 1 {
        return Ok(None);
    }
    let dm = BigInt::from(d)
        .mod_floor(&p_int)
        .to_biguint()
        .expect("floor residue is nonnegative");
    // `p` passed Miller–Rabin and the Kronecker filter, so a root exists;
    // treat any failure as a composite that slipped through and move on.
    let sq = match sqrt_mod_prime(&dm, p, policy.seed) {
        Ok(sq) => sq,
        Err(_) => return Ok(None),
    };
    let sol = match cornacchia(d, p, &sq)? {
        Some(sol) => sol,
        None => return Ok(None),
    };

    // Trace orbit: ±x always; for D = −3 the extra units of the order
    // contribute ±(x + 3y)/2 and ±(x − 3y)/2 as well (all integers, since
    // x and y share parity and here both are odd).
    let x = BigInt::from(sol.x.clone());
    let y = BigInt::from(sol.y.clone());
    let mut traces = vec![x.clone(), -x.clone()];
    if d == -3 {
        let y3 = &y * BigInt::from(3);
        let s = (&x + &y3) / BigInt::from(2);
        let t = (&x - &y3) / BigInt::from(2);
        traces.extend([s.clone(), -s, t.clone(), -t]);
    }

    let mid = BigInt::from(p.clone()) + 1u32;
    for (idx, tr) in traces.iter().enumerate() {
        let q = (&mid + tr)
            .to_biguint()
            .expect("orders in the Hasse interval are positive");
        if q == *p || q < *ten_km1 || q >= *ten_k {
            continue;
        }
        if !is_probable_prime(&q, MR_ROUNDS, policy.seed) {
            continue;
        }
        let certified = if d == -3 {
            // CM by the full ring of Eisenstein integers: the curve is a
            // sextic twist of Y² = X³ + 1, no class polynomial needed.
            let base = Curve::new(p.clone(), BigUint::zero(), BigUint::one())?;
            certify_some_twist(&base, &q, policy)?
        } else {
            certify_via_class_poly(&q, d, p, policy)?.map(|(curve, cert, _)| (curve, cert))
        };
        if let Some((curve, certificate)) = certified {
            return Ok(Some(FixedSizeResult {
                k,
                d,
                p: p.clone(),
                q,
                unit_index: idx as u32,
                curve,
                certificate,
            }));
        }
    }
    Ok(None)
}

/// Walk the twists of `base` and return the first one certified to have
/// exactly `order` points.  `None` when no twist certifies (or the order
/// is ambiguous at this field size).
fn certify_some_twist(
    base: &Curve,
    order: &BigUint,
    policy: &SearchPolicy,
) -> Result<Option<(Curve, OrderCertificate)>> {
    for twist in enumerate_twists(base) {
        match verify_order(&twist, order, CERT_TRIALS, policy.seed) {
            Ok(Some(cert)) => return Ok(Some((twist, cert))),
            Ok(None) => continue,
            Err(Error::AmbiguousHasse) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Build the class polynomial for `d`, find a root mod `p`, transport it to
/// a j-invariant, and certify a twist of the resulting curve to have exactly
/// `order` points.  Returns the curve, its certificate, and the decimal
/// digit count of the polynomial's largest coefficient; `None` when `d` has
/// no root mod `p` or no twist certifies.
fn certify_via_class_poly(
    order: &BigUint,
    d: i64,
    p: &BigUint,
    policy: &SearchPolicy,
) -> Result<Option<(Curve, OrderCertificate, usize)>> {
    let use_gamma2 = d % 3 != 0 && !policy.force_j;
    let poly = if use_gamma2 {
        gamma2_class_poly(d)?
    } else {
        hilbert_class_poly(d)?
    };
    let digits = poly.max_coefficient_decimal_digits();
    let root = match find_root_mod_p(&poly, p, policy.seed) {
        Ok(root) => root,
        Err(Error::NoRootModP) => return Ok(None),
        Err(e) => return Err(e),
    };
    let invariant = if use_gamma2 { Invariant::Gamma2 } else { Invariant::J };
    let j0 = invariant_root_to_j(invariant, &root, p)?;
    let base = match curve_from_j(&j0, p) {
        Ok(curve) => curve,
        Err(Error::SpecialJ(0)) => Curve::new(p.clone(), BigUint::zero(), BigUint::one())?,
        Err(Error::SpecialJ(_)) => Curve::new(p.clone(), BigUint::one(), BigUint::zero())?,
        Err(e) => return Err(e),
    };
    Ok(certify_some_twist(&base, order, policy)?.map(|(curve, cert)| (curve, cert, digits)))
}

/// Re-validate every claim a construction makes, from scratch and without
/// re-running any search.  Returns the first broken invariant.
pub fn check_certificate(c: &Construction) -> std::result::Result<(), CertificateIssue> {
    match c {
        Construction::FixedOrder(r) => check_claims(&r.n, &r.p, r.d, &r.curve, &r.certificate),
        Construction::FixedSize(r) => {
            check_claims(&r.q, &r.p, r.d, &r.curve, &r.certificate)?;
            let ten_km1 = BigUint::from(10u8).pow(r.k - 1);
            let ten_k = BigUint::from(10u8).pow(r.k);
            if r.q < ten_km1 || r.q >= ten_k {
                return Err(CertificateIssue::WrongDigitCount);
            }
            Ok(())
        }
    }
}

fn check_claims(
    order: &BigUint,
    p: &BigUint,
    d: i64,
    curve: &Curve,
    cert: &OrderCertificate,
) -> std::result::Result<(), CertificateIssue> {
    if cert.n != *order {
        return Err(CertificateIssue::OrderMismatch);
    }
    if cert.curve != *curve {
        return Err(CertificateIssue::CurveMismatch);
    }
    if d >= 0 || d.rem_euclid(8) != 5 {
        return Err(CertificateIssue::IneligibleDiscriminant);
    }
    if p == order {
        return Err(CertificateIssue::AnomalousPair);
    }
    if !is_probable_prime(order, MR_ROUNDS, 0) {
        return Err(CertificateIssue::CompositeOrder);
    }
    if !is_probable_prime(p, MR_ROUNDS, 0) {
        return Err(CertificateIssue::CompositeField);
    }
    if curve.p != *p || Curve::new(curve.p.clone(), curve.a.clone(), curve.b.clone()).is_err() {
        return Err(CertificateIssue::BadCurve);
    }
    if !in_hasse_interval(order, p) {
        return Err(CertificateIssue::OutsideHasse);
    }
    if !order_uniquely_determined(order, p) {
        return Err(CertificateIssue::AmbiguousOrder);
    }
    if cert.witness.is_infinity() || !curve.is_on_curve(&cert.witness) {
        return Err(CertificateIssue::WitnessNotOnCurve);
    }
    // A failed inversion inside the group law means a zero divisor mod p:
    // a compositeness witness that Miller–Rabin missed.
    match try_scalar_mul(order, &cert.witness, curve) {
        Ok(Point::Infinity) => {}
        Ok(_) => return Err(CertificateIssue::WrongWitnessOrder),
        Err(_) => return Err(CertificateIssue::CompositeField),
    }
    // Norm equation: 4p − t², t the trace, must be |d| times a nonzero
    // square for the Frobenius to live in the order of discriminant d.
    let t = BigInt::from(p.clone()) + 1u32 - BigInt::from(order.clone());
    let rem = (BigInt::from(p.clone()) << 2u32) - &t * &t;
    let abs_d = BigInt::from(d.unsigned_abs());
    let (quot, exact) = rem.div_rem(&abs_d);
    if !exact.is_zero() || quot.is_zero() || quot.is_negative() {
        return Err(CertificateIssue::CmIdentityBroken);
    }
    let ysq = quot.to_biguint().expect("checked nonnegative");
    let yy = ysq.sqrt();
    if &yy * &yy != ysq {
        return Err(CertificateIssue::CmIdentityBroken);
    }
    Ok(())
}
