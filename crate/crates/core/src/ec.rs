//! Elliptic curves over prime fields.
//!
//! Short Weierstrass curves `Y² = X³ + AX + B` over `F_p` with `p > 3`: the
//! curve-from-`j` construction `a = 27j₀/(4(1728−j₀))`, twist enumeration
//! (the quadratic pair for generic `j`, quartic and sextic families for
//! `j = 1728` and `j = 0`), the chord–tangent group law, one-point order
//! certificates, and a naive point-counting oracle for small fields.
//!
//! The order certificate rests on the classical argument: if `N` is prime,
//! `N` lies in the Hasse interval of `p`, `2N` exceeds its upper end, and a
//! point `P ≠ O` satisfies `N·P = O`, then `#E(F_p)` is a multiple of `N`
//! inside an interval too narrow to hold `2N`, hence exactly `N`.  One
//! sampled point decides the question in both directions: `N·P ≠ O` proves
//! the order is *not* `N`, because the order of `P` divides `#E`.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::arith::{invert_mod, is_probable_prime, jacobi_u64, kronecker, sqrt_mod_prime};
use crate::error::{Error, Result};

/// Miller–Rabin rounds used when an order routine re-checks primality.
const MR_ROUNDS: u32 = 40;

/// Largest field the naive counting oracle accepts.
const ORACLE_LIMIT: u64 = 4_000_000;

/// A short Weierstrass curve `Y² = X³ + AX + B` over `F_p`.
///
/// Invariants: `p` is an odd (probable) prime `> 3` supplied by the caller,
/// coefficients are reduced mod `p`, and the curve is nonsingular
/// (`4A³ + 27B² ≢ 0`).  [`Curve::new`] validates everything except the
/// primality of `p`, which the order machinery re-examines at runtime: a
/// composite `p` unmasks itself through a failed inversion or a failed
/// certificate, never through unsoundness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    /// Field characteristic.
    pub p: BigUint,
    /// Coefficient of `X`.
    pub a: BigUint,
    /// Constant term.
    pub b: BigUint,
}

impl Curve {
    /// Builds a curve, reducing the coefficients and rejecting singular
    /// equations.
    ///
    /// # Errors
    ///
    /// * [`Error::Domain`] if `p ≤ 3` or `p` is even, or if
    ///   `4A³ + 27B² ≡ 0 (mod p)` (a singular cubic).
    pub fn new(p: BigUint, a: BigUint, b: BigUint) -> Result<Curve> {
        if p <= BigUint::from(3u8) || p.is_even() {
            return Err(Error::Domain("field characteristic must be an odd prime > 3"));
        }
        let a = a % &p;
        let b = b % &p;
        let curve = Curve { p, a, b };
        if curve.discriminant_term().is_zero() {
            return Err(Error::Domain("singular curve: 4A³ + 27B² ≡ 0 (mod p)"));
        }
        Ok(curve)
    }

    /// `4A³ + 27B² mod p`, the quantity whose non-vanishing makes the curve
    /// an elliptic curve.
    fn discriminant_term(&self) -> BigUint {
        let a3 = self.a.modpow(&BigUint::from(3u8), &self.p);
        let b2 = (&self.b * &self.b) % &self.p;
        (a3 * 4u8 + b2 * 27u8) % &self.p
    }

    /// The `j`-invariant `1728·4A³/(4A³ + 27B²) mod p`.
    pub fn j_invariant(&self) -> BigUint {
        let a3 = self.a.modpow(&BigUint::from(3u8), &self.p);
        let numerator = (a3 * 4u8 * BigUint::from(1728u32)) % &self.p;
        let inverse = invert_mod(&self.discriminant_term(), &self.p)
            .expect("nonsingular curve over a prime field");
        (numerator * inverse) % &self.p
    }

    /// Right-hand side `x³ + Ax + B mod p`.
    fn rhs(&self, x: &BigUint) -> BigUint {
        let x = x % &self.p;
        (x.modpow(&BigUint::from(3u8), &self.p) + &self.a * &x + &self.b) % &self.p
    }

    /// Whether `point` satisfies the curve equation (infinity always does).
    pub fn is_on_curve(&self, point: &Point) -> bool {
        match point {
            Point::Infinity => true,
            Point::Affine { x, y } => {
                x < &self.p && y < &self.p && (y * y) % &self.p == self.rhs(x)
            }
        }
    }
}

/// A point on a curve: infinity or an affine pair reduced mod `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Point {
    /// The group identity.
    Infinity,
    /// An affine point `(x, y)`.
    Affine {
        /// x-coordinate.
        x: BigUint,
        /// y-coordinate.
        y: BigUint,
    },
}

impl Point {
    /// Convenience constructor for an affine point.
    pub fn affine(x: impl Into<BigUint>, y: impl Into<BigUint>) -> Point {
        Point::Affine { x: x.into(), y: y.into() }
    }

    /// Whether this is the identity.
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
}

/// The curve `Y² = X³ + aX − a` with `a = 27j₀/(4(1728 − j₀))`, whose
/// `j`-invariant is exactly `j₀`.
///
/// # Errors
///
/// * [`Error::SpecialJ`] for `j₀ ≡ 0` or `j₀ ≡ 1728`, where the formula
///   degenerates; the caller must use the fixed families `Y² = X³ + B`
///   (for `j = 0`) or `Y² = X³ + AX` (for `j = 1728`) instead.
pub fn curve_from_j(j0: &BigUint, p: &BigUint) -> Result<Curve> {
    let j0 = j0 % p;
    let j1728 = BigUint::from(1728u32) % p;
    if j0.is_zero() {
        return Err(Error::SpecialJ(0));
    }
    if j0 == j1728 {
        return Err(Error::SpecialJ(1728));
    }
    // 1728 − j₀ ≠ 0, so the denominator 4(1728 − j₀) is invertible.
    let diff = (&j1728 + p - &j0) % p;
    let denominator = (diff * 4u8) % p;
    let inverse = invert_mod(&denominator, p)?;
    let a = (j0 * 27u8 * inverse) % p;
    let b = p - &a; // −a mod p; a ≠ 0 because j₀ ≠ 0
    Curve::new(p.clone(), a, b)
}

/// Least positive quadratic non-residue modulo `p`.
fn least_nonresidue(p: &BigUint) -> BigUint {
    let p_int = BigInt::from(p.clone());
    let mut g = 2u64;
    loop {
        if kronecker(&BigInt::from(g), &p_int) == -1 {
            return BigUint::from(g);
        }
        g += 1;
    }
}

/// Least element generating `F_p*/(F_p*)⁶` for `p ≡ 1 (mod 3)`: the smallest
/// `g` that is neither a square nor a cube.
fn least_sextic_generator(p: &BigUint) -> BigUint {
    let p_int = BigInt::from(p.clone());
    let cube_exp = (p - 1u8) / 3u8;
    let one = BigUint::one();
    let mut g = 2u64;
    loop {
        let gv = BigUint::from(g);
        if kronecker(&BigInt::from(g), &p_int) == -1 && gv.modpow(&cube_exp, p) != one {
            return gv;
        }
        g += 1;
    }
}

/// Representatives of every twist class of `E`, the original curve first.
///
/// * generic `j`: the quadratic pair `[E, (g²A, g³B)]` with `g` the least
///   non-residue;
/// * `A = 0` (`j = 0`): `Y² = X³ + B·gᵏ` with `g` generating
///   `F_p*/(F_p*)⁶` — six classes for `p ≡ 1 (mod 3)`, otherwise the
///   quadratic pair;
/// * `B = 0` (`j = 1728`): `Y² = X³ + A·gᵏX` — four classes for
///   `p ≡ 1 (mod 4)`, otherwise the quadratic pair.
pub fn enumerate_twists(e: &Curve) -> Vec<Curve> {
    let p = &e.p;
    if e.a.is_zero() {
        let classes: u32 = if (p % 3u8) == BigUint::one() { 6 } else { 2 };
        let g = if classes == 6 { least_sextic_generator(p) } else { least_nonresidue(p) };
        let mut b = e.b.clone();
        let mut twists = Vec::with_capacity(classes as usize);
        for _ in 0..classes {
            twists.push(Curve { p: p.clone(), a: BigUint::zero(), b: b.clone() });
            b = (b * &g) % p;
        }
        twists
    } else if e.b.is_zero() {
        let classes: u32 = if (p % 4u8) == BigUint::one() { 4 } else { 2 };
        let g = least_nonresidue(p);
        let mut a = e.a.clone();
        let mut twists = Vec::with_capacity(classes as usize);
        for _ in 0..classes {
            twists.push(Curve { p: p.clone(), a: a.clone(), b: BigUint::zero() });
            a = (a * &g) % p;
        }
        twists
    } else {
        let g = least_nonresidue(p);
        let g2 = (&g * &g) % p;
        let g3 = (&g2 * &g) % p;
        vec![
            e.clone(),
            Curve { p: p.clone(), a: (&e.a * g2) % p, b: (&e.b * g3) % p },
        ]
    }
}

/// Chord–tangent addition; fails only when a required inverse does not
/// exist, which proves the "prime" `p` composite.
fn try_add(p1: &Point, p2: &Point, e: &Curve) -> Result<Point> {
    debug_assert!(e.is_on_curve(p1), "left summand must lie on the curve");
    debug_assert!(e.is_on_curve(p2), "right summand must lie on the curve");
    let p = &e.p;
    let (x1, y1, x2, y2) = match (p1, p2) {
        (Point::Infinity, q) => return Ok(q.clone()),
        (q, Point::Infinity) => return Ok(q.clone()),
        (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
    };
    let lambda = if x1 == x2 {
        if (y1 + y2) % p == BigUint::zero() {
            return Ok(Point::Infinity); // P + (−P), including 2-torsion y = 0
        }
        // Tangent: λ = (3x₁² + A) / (2y₁).
        let numerator = (x1 * x1 * 3u8 + &e.a) % p;
        let inverse = invert_mod(&((y1 * 2u8) % p), p)?;
        (numerator * inverse) % p
    } else {
        // Chord: λ = (y₂ − y₁) / (x₂ − x₁).
        let numerator = (p + y2 - y1) % p;
        let inverse = invert_mod(&((p + x2 - x1) % p), p)?;
        (numerator * inverse) % p
    };
    let x3 = (&lambda * &lambda + p + p - x1 - x2) % p;
    let y3 = (lambda * ((p + x1 - &x3) % p) + p - y1) % p;
    Ok(Point::Affine { x: x3, y: y3 })
}

/// Group-law addition.  Panics if `p` is composite enough to break an
/// inversion; use [`verify_order`] for composite-tolerant paths.
pub fn add(p1: &Point, p2: &Point, e: &Curve) -> Point {
    try_add(p1, p2, e).expect("group-law inverse exists over a prime field")
}

/// `n·P` by double-and-add; same failure contract as [`try_add`].
pub(crate) fn try_scalar_mul(n: &BigUint, point: &Point, e: &Curve) -> Result<Point> {
    let mut result = Point::Infinity;
    let mut addend = point.clone();
    let bits = n.bits();
    for i in 0..bits {
        if n.bit(i) {
            result = try_add(&result, &addend, e)?;
        }
        if i + 1 < bits {
            addend = try_add(&addend, &addend, e)?;
        }
    }
    Ok(result)
}

/// Scalar multiple `n·P`.  Panics if `p` is composite enough to break an
/// inversion; use [`verify_order`] for composite-tolerant paths.
pub fn scalar_mul(n: &BigUint, point: &Point, e: &Curve) -> Point {
    try_scalar_mul(n, point, e).expect("group-law inverse exists over a prime field")
}

/// A self-contained proof that `#E(F_p) = N`.
///
/// Validity is re-checkable from the stored fields alone: `witness` is an
/// affine point of the curve, `N·witness = O`, `N` is prime, `N` lies in the
/// Hasse interval of `p`, and `2N` exceeds its upper end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderCertificate {
    /// The certified curve.
    pub curve: Curve,
    /// The certified group order.
    pub n: BigUint,
    /// An affine point with `n·witness = O`.
    pub witness: Point,
}

/// Exact test of `2N > p + 1 + 2√p`, the threshold above which at most one
/// multiple of `N` fits in the Hasse interval: `t = 2N − p − 1` must be
/// positive with `t² > 4p`.
pub fn order_uniquely_determined(n: &BigUint, p: &BigUint) -> bool {
    let t = BigInt::from(n * 2u8) - BigInt::from(p + 1u8);
    t > BigInt::zero() && &t * &t > BigInt::from(p * 4u8)
}

/// Exact test of `N ∈ [p+1−2√p, p+1+2√p]`: `(N − p − 1)² ≤ 4p`.
pub fn in_hasse_interval(n: &BigUint, p: &BigUint) -> bool {
    let t = BigInt::from(n.clone()) - BigInt::from(p + 1u8);
    &t * &t <= BigInt::from(p * 4u8)
}

/// Decides whether `#E(F_p) = N` with a single witness point.
///
/// Sampling starts at `(1, 1)` — which lies on every curve of the shape
/// `Y² = X³ + aX − a` — and falls back to seeded random x-coordinates, using
/// up to `trials` draws to land on the curve.  The first realized point `P`
/// decides definitively: `N·P = O` certifies the order (given the Hasse
/// uniqueness precondition), `N·P ≠ O` refutes it, because the order of `P`
/// divides `#E`.  `Ok(None)` is returned when the order is refuted, when `N`
/// is outside the Hasse interval or fails Miller–Rabin, when a broken
/// inversion unmasks `p` as composite, or when no draw lands on the curve.
///
/// # Errors
///
/// * [`Error::AmbiguousHasse`] if `2N ≤ p + 1 + 2√p`, where one point can
///   never pin down the order.
pub fn verify_order(
    e: &Curve,
    n: &BigUint,
    trials: u32,
    seed: u64,
) -> Result<Option<OrderCertificate>> {
    if !order_uniquely_determined(n, &e.p) {
        return Err(Error::AmbiguousHasse);
    }
    if !in_hasse_interval(n, &e.p) || !is_probable_prime(n, MR_ROUNDS, seed) {
        return Ok(None);
    }

    let one = Point::affine(1u8, 1u8);
    let mut candidate = if e.is_on_curve(&one) { Some(one) } else { None };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut draws = 0u32;
    loop {
        let point = match candidate.take() {
            Some(point) => point,
            None => {
                if draws >= trials.max(1) {
                    return Ok(None); // never landed on the curve; cannot certify
                }
                draws += 1;
                let x = rng.gen_biguint_below(&e.p);
                match sqrt_mod_prime(&e.rhs(&x), &e.p, seed) {
                    Ok(y) => Point::Affine { x, y },
                    Err(Error::NoSquareRoot) => continue,
                    Err(Error::BadModulus) => return Ok(None), // p unmasked composite
                    Err(other) => return Err(other),
                }
            }
        };
        return match try_scalar_mul(n, &point, e) {
            Ok(Point::Infinity) => Ok(Some(OrderCertificate {
                curve: e.clone(),
                n: n.clone(),
                witness: point,
            })),
            Ok(_) => Ok(None), // order of the point does not divide N: #E ≠ N
            Err(Error::NonInvertible { .. }) | Err(Error::BadModulus) => Ok(None),
            Err(other) => Err(other),
        };
    }
}

/// Exact `#E(F_p) = p + 1 + Σ_x (x³+Ax+B | p)` for small fields.
///
/// # Errors
///
/// * [`Error::OracleRange`] if `p > 4·10⁶`.
pub fn naive_point_count(e: &Curve) -> Result<u64> {
    let p = e.p.to_u64().filter(|&p| p <= ORACLE_LIMIT).ok_or(Error::OracleRange)?;
    let a = e.a.to_u64().expect("coefficient reduced mod small p");
    let b = e.b.to_u64().expect("coefficient reduced mod small p");
    let mut count = (p + 1) as i64;
    for x in 0..p {
        let rhs = ((x * x % p) * x + a * x + b) % p;
        count += i64::from(jacobi_u64(rhs, p));
    }
    Ok(count as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::next_prime;
    use num_integer::Roots;
    use std::str::FromStr;

    fn curve(p: u64, a: u64, b: u64) -> Curve {
        Curve::new(BigUint::from(p), BigUint::from(a), BigUint::from(b)).unwrap()
    }

    fn p60() -> BigUint {
        BigUint::from_str("123456789012345678901234567890654833374525085966737125236501")
            .unwrap()
    }

    fn n60() -> BigUint {
        BigUint::from_str("123456789012345678901234567890123456789012345678901234568197")
            .unwrap()
    }

    #[test]
    fn curve_from_j_fixture() {
        let e = curve_from_j(&BigUint::from(5u8), &BigUint::from(13u8)).unwrap();
        assert_eq!(e.a, BigUint::from(9u8));
        assert_eq!(e.b, BigUint::from(4u8)); // −9 mod 13
        assert_eq!(e.j_invariant(), BigUint::from(5u8));
        assert_eq!(
            curve_from_j(&BigUint::zero(), &BigUint::from(13u8)),
            Err(Error::SpecialJ(0))
        );
        // 1728 ≡ 12 (mod 13)
        assert_eq!(
            curve_from_j(&BigUint::from(12u8), &BigUint::from(13u8)),
            Err(Error::SpecialJ(1728))
        );
    }

    #[test]
    fn curve_from_j_roundtrips_on_random_inputs() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 100 {
            let p = next_prime(&rng.gen_biguint_below(&BigUint::from(10_000u32)));
            if p < BigUint::from(5u8) {
                continue;
            }
            let j0 = rng.gen_biguint_below(&p);
            match curve_from_j(&j0, &p) {
                Ok(e) => {
                    assert_eq!(e.j_invariant(), j0, "j mismatch for p={p}, j0={j0}");
                    checked += 1;
                }
                Err(Error::SpecialJ(_)) => continue,
                Err(other) => panic!("unexpected error: {other}"),
            }
        }
    }

    #[test]
    fn rejects_singular_and_tiny_fields() {
        assert!(Curve::new(BigUint::from(13u8), BigUint::zero(), BigUint::zero()).is_err());
        // 4·(−3)³ + 27·4 = −108 + 108 = 0: the classic singular cubic.
        assert!(Curve::new(BigUint::from(13u8), BigUint::from(10u8), BigUint::from(2u8)).is_err());
        assert!(Curve::new(BigUint::from(3u8), BigUint::one(), BigUint::one()).is_err());
        assert!(Curve::new(BigUint::from(8u8), BigUint::one(), BigUint::one()).is_err());
    }

    #[test]
    fn group_law_on_the_six_point_curve() {
        // Y² = X³ + 1 over F₅ has exactly the points
        // O, (0,±1), (2,±2), (4,0).
        let e = curve(5, 0, 1);
        assert_eq!(naive_point_count(&e).unwrap(), 6);
        let p01 = Point::affine(0u8, 1u8);
        assert!(e.is_on_curve(&p01));
        assert_eq!(scalar_mul(&BigUint::from(6u8), &p01, &e), Point::Infinity);
        assert_eq!(scalar_mul(&BigUint::zero(), &p01, &e), Point::Infinity);
        assert_eq!(scalar_mul(&BigUint::one(), &p01, &e), p01);
        // P + (−P) = O.
        let neg = Point::affine(0u8, 4u8);
        assert_eq!(add(&p01, &neg, &e), Point::Infinity);
        // scalar_mul(m+n) = scalar_mul(m) + scalar_mul(n), m = 2, n = 3.
        let lhs = scalar_mul(&BigUint::from(5u8), &p01, &e);
        let rhs = add(
            &scalar_mul(&BigUint::from(2u8), &p01, &e),
            &scalar_mul(&BigUint::from(3u8), &p01, &e),
            &e,
        );
        assert_eq!(lhs, rhs);
        // Associativity spot check with distinct points.
        let q = Point::affine(2u8, 2u8);
        let r = Point::affine(4u8, 0u8);
        assert_eq!(
            add(&add(&p01, &q, &e), &r, &e),
            add(&p01, &add(&q, &r, &e), &e)
        );
    }

    #[test]
    fn generic_twist_pair_orders_sum_to_2p_plus_2() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 50 {
            let p = next_prime(&rng.gen_biguint_below(&BigUint::from(1000u32)));
            if p < BigUint::from(5u8) {
                continue;
            }
            let a = rng.gen_biguint_below(&p);
            let b = rng.gen_biguint_below(&p);
            let Ok(e) = Curve::new(p.clone(), a, b) else { continue };
            if e.a.is_zero() || e.b.is_zero() {
                continue;
            }
            let twists = enumerate_twists(&e);
            assert_eq!(twists.len(), 2);
            assert_eq!(twists[0], e);
            let sum = naive_point_count(&twists[0]).unwrap() + naive_point_count(&twists[1]).unwrap();
            let p_u64 = p.to_u64().unwrap();
            assert_eq!(sum, 2 * p_u64 + 2, "p={p_u64}");
            // Twisting twice returns to the original class.
            let back = &enumerate_twists(&twists[1])[1];
            assert_eq!(back.j_invariant(), e.j_invariant());
            assert_eq!(
                naive_point_count(back).unwrap(),
                naive_point_count(&e).unwrap()
            );
            checked += 1;
        }
    }

    #[test]
    fn sextic_twists_for_j_zero() {
        // p = 13 ≡ 1 (mod 3): six classes; orders sum to 6(p+1).
        let e = curve(13, 0, 1);
        let twists = enumerate_twists(&e);
        assert_eq!(twists.len(), 6);
        let mut orders: Vec<u64> = twists.iter().map(|t| naive_point_count(t).unwrap()).collect();
        assert_eq!(orders.iter().sum::<u64>(), 6 * 14);
        // 4·13 = 7² + 3·1²: the six orders are p+1±7, p+1±5, p+1±2.
        orders.sort_unstable();
        assert_eq!(orders, vec![7, 9, 12, 16, 19, 21]);
        // p = 5 ≡ 2 (mod 3): every element is a cube, only the quadratic pair.
        let twists5 = enumerate_twists(&curve(5, 0, 1));
        assert_eq!(twists5.len(), 2);
        assert_eq!(
            naive_point_count(&twists5[0]).unwrap() + naive_point_count(&twists5[1]).unwrap(),
            12
        );
    }

    #[test]
    fn quartic_twists_for_j_1728() {
        // p = 13 ≡ 1 (mod 4): four classes; orders sum to 4(p+1).
        let e = curve(13, 1, 0);
        let twists = enumerate_twists(&e);
        assert_eq!(twists.len(), 4);
        let orders: Vec<u64> = twists.iter().map(|t| naive_point_count(t).unwrap()).collect();
        assert_eq!(orders.iter().sum::<u64>(), 4 * 14);
        // p = 7 ≡ 3 (mod 4): the quadratic pair only (both supersingular).
        let twists7 = enumerate_twists(&curve(7, 1, 0));
        assert_eq!(twists7.len(), 2);
        assert_eq!(
            naive_point_count(&twists7[0]).unwrap() + naive_point_count(&twists7[1]).unwrap(),
            16
        );
    }

    #[test]
    fn verify_order_refutes_and_certifies() {
        // Y² = X³ + 1 over F₅ has 6 points; N = 7 is refutable by one point.
        let e = curve(5, 0, 1);
        assert_eq!(verify_order(&e, &BigUint::from(7u8), 8, 0).unwrap(), None);
        // N = 5: 2N = 10 ≤ 6 + 2√5, the certificate cannot distinguish 5·k.
        assert_eq!(
            verify_order(&e, &BigUint::from(5u8), 8, 0),
            Err(Error::AmbiguousHasse)
        );
        // A curve of genuinely prime order: find one among the twists over F₁₃.
        let mut certified = 0;
        for b in 1..13u64 {
            let e = curve(13, 0, b);
            let count = naive_point_count(&e).unwrap();
            for n in [17u64, 19] {
                let n = BigUint::from(n);
                if !order_uniquely_determined(&n, &e.p) {
                    continue;
                }
                let result = verify_order(&e, &n, 8, 1).unwrap();
                if count == n.to_u64().unwrap() {
                    let cert = result.expect("true order must certify");
                    assert!(!cert.witness.is_infinity());
                    assert!(e.is_on_curve(&cert.witness));
                    assert_eq!(
                        scalar_mul(&cert.n, &cert.witness, &cert.curve),
                        Point::Infinity
                    );
                    certified += 1;
                } else {
                    assert_eq!(result, None, "b={b}, n={n}");
                }
            }
        }
        assert!(certified > 0, "at least one 17/19-point curve exists over F_13");
    }

    #[test]
    fn verify_order_matches_naive_count_across_sextic_twists() {
        // For every j = 0 twist class and every prime N in the upper part of
        // the Hasse interval, the one-point decision agrees with counting.
        for p in [7u64, 13, 19, 31, 37, 43, 61, 67, 73] {
            let base = curve(p, 0, 1);
            for twist in enumerate_twists(&base) {
                let count = naive_point_count(&twist).unwrap();
                let lo = p + 1 - (4 * p).sqrt();
                let hi = p + 1 + (4 * p).sqrt();
                for n in lo..=hi {
                    if !crate::arith::is_prime_u64(n) {
                        continue;
                    }
                    let n_big = BigUint::from(n);
                    if !order_uniquely_determined(&n_big, &twist.p) {
                        continue;
                    }
                    let verdict = verify_order(&twist, &n_big, 8, 3).unwrap();
                    assert_eq!(
                        verdict.is_some(),
                        count == n,
                        "p={p}, twist b={}, N={n}, true count {count}",
                        twist.b
                    );
                }
            }
        }
    }

    #[test]
    fn certifies_the_reference_sixty_digit_curve() {
        // The j-root and trace data behind the 60-digit fixed-order fixture.
        let p = p60();
        let n = n60();
        let j0 = BigUint::from_str(
            "22424748001210748760281984724874650497757984613054432109806",
        )
        .unwrap();
        let e = curve_from_j(&j0, &p).unwrap();
        assert_eq!(
            e.a,
            BigUint::from_str(
                "112507913528623610837613885503682230698868883572599681384335"
            )
            .unwrap()
        );
        assert_eq!(e.b, &p - &e.a);
        // (1,1) lies on Y² = X³ + aX − a and certifies the order.
        let cert = verify_order(&e, &n, 8, 0).unwrap().expect("curve has N points");
        assert_eq!(cert.witness, Point::affine(1u8, 1u8));
        assert_eq!(scalar_mul(&n, &cert.witness, &e), Point::Infinity);
        // A wrong (but prime, Hasse-feasible) order is refuted.
        let wrong = next_prime(&n);
        assert!(in_hasse_interval(&wrong, &p));
        assert_eq!(verify_order(&e, &wrong, 8, 0).unwrap(), None);
    }

    #[test]
    fn naive_count_range_checks() {
        assert_eq!(
            naive_point_count(&curve(4_000_037, 1, 1)),
            Err(Error::OracleRange)
        );
        // Hasse bound holds on a few arbitrary small curves.
        for (p, a, b) in [(101u64, 3u64, 7u64), (199, 55, 1), (997, 0, 5)] {
            let count = naive_point_count(&curve(p, a, b)).unwrap();
            let s = (4 * p).sqrt();
            assert!(count >= p + 1 - s && count <= p + 1 + s);
        }
    }
}
