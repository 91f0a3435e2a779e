//! Class polynomials for imaginary quadratic orders.
//!
//! Builds the Hilbert class polynomial (roots j(τ_Q)) and its γ₂ companion
//! (roots γ₂(τ_Q′), which cube to the j-roots) by high-precision complex
//! evaluation over the reduced forms, with guarded rounding to integers.
//! Also: transport of invariant roots to j-roots mod p, root finding and
//! split testing mod p, the reduction-factor arithmetic, and the on-disk
//! cache format.

pub(crate) mod cfloat;
pub(crate) mod eta;
mod polymod;

use std::io::{self, BufRead, Write};
use std::path::Path;

use astro_float::{BigFloat, Consts};
use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::{invert_mod, mod_pow};
use crate::error::{Error, Result};
use crate::quadratic::{reduced_forms, QuadraticForm};
use cfloat::{bigint_to_bigfloat, round_nearest, Cx, RM};
use eta::modular_values;

/// Which invariant a class polynomial was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyKind {
    /// Hilbert class polynomial (roots are j-invariants).
    J,
    /// γ₂ class polynomial (roots cube to j-invariants).
    Gamma2,
    /// Imported from outside (e.g. a published Weber-f polynomial); not
    /// recomputable here.
    External,
}

impl PolyKind {
    pub fn token(self) -> &'static str {
        match self {
            PolyKind::J => "J",
            PolyKind::Gamma2 => "GAMMA2",
            PolyKind::External => "EXTERNAL",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "J" => Some(PolyKind::J),
            "GAMMA2" => Some(PolyKind::Gamma2),
            "EXTERNAL" => Some(PolyKind::External),
            _ => None,
        }
    }
}

/// The invariant a residue is expressed in, for transport to a j-invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Invariant {
    J,
    Gamma2,
    WeberF,
}

/// A monic integer polynomial attached to a discriminant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassPolynomial {
    pub d: i64,
    pub kind: PolyKind,
    /// Ascending degree; the last entry is the leading 1.
    pub coefficients: Vec<BigInt>,
}

impl ClassPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Length in decimal digits of the largest coefficient magnitude.
    pub fn max_coefficient_decimal_digits(&self) -> usize {
        self.coefficients
            .iter()
            .map(|c| c.abs().to_string().len())
            .max()
            .unwrap_or(1)
    }
}

/// Working precision in bits for constructing the class polynomial of `d`
/// from its reduced forms: ⌈(π√|D|/ln 2)·Σ 1/a_Q⌉ + 4h + 64 for the
/// j-invariant, with the leading term divided by 3 for γ₂ (whose roots are
/// cube roots of the j-roots).
pub fn precision_for(d: i64, forms: &[QuadraticForm], kind: PolyKind) -> usize {
    assert!(
        kind != PolyKind::External,
        "precision policy applies to computed kinds only"
    );
    let p = 192;
    let mut cc = Consts::new().expect("constants cache");
    let pi = cc.pi(p, RM);
    let sqrt_d = BigFloat::from_u64(d.unsigned_abs(), p).sqrt(p, RM);
    let ln2 = BigFloat::from_u64(2, p).ln(p, RM, &mut cc);
    let mut sum = BigFloat::from_u64(0, p);
    for f in forms {
        sum = sum.add(
            &BigFloat::from_u64(1, p).div(&BigFloat::from_u64(f.a as u64, p), p, RM),
            p,
            RM,
        );
    }
    let mut lead = pi.mul(&sqrt_d, p, RM).div(&ln2, p, RM).mul(&sum, p, RM);
    if kind == PolyKind::Gamma2 {
        lead = lead.div(&BigFloat::from_u64(3, p), p, RM);
    }
    ceil_to_usize(&lead) + 4 * forms.len() + 64
}

fn ceil_to_usize(x: &BigFloat) -> usize {
    let fl = x.floor();
    let (n, _) = round_nearest(&fl);
    let n: usize = n.try_into().expect("precision term out of range");
    if x.sub(&fl, 192, RM).is_zero() {
        n
    } else {
        n + 1
    }
}

/// The Hilbert class polynomial P_D = Π (X − j(τ_Q)) over the reduced forms
/// of `d`, rounded to exact integers under a 1/4-distance guard with
/// precision escalation.
pub fn hilbert_class_poly(d: i64) -> Result<ClassPolynomial> {
    class_poly(d, PolyKind::J)
}

/// The γ₂ class polynomial of `d` (3 ∤ d): monic of degree h(d), its
/// complex roots cube to the roots of the Hilbert class polynomial.
pub fn gamma2_class_poly(d: i64) -> Result<ClassPolynomial> {
    if d.rem_euclid(3) == 0 {
        return Err(Error::InvariantNotApplicable(
            "gamma2 requires a discriminant not divisible by 3",
        ));
    }
    class_poly(d, PolyKind::Gamma2)
}

const MAX_ESCALATIONS: u32 = 6;

fn class_poly(d: i64, kind: PolyKind) -> Result<ClassPolynomial> {
    let forms = reduced_forms(d);
    let mut prec = precision_for(d, &forms, kind);
    for _ in 0..=MAX_ESCALATIONS {
        let roots = invariant_roots(d, &forms, kind, prec);
        let poly = linear_product_tree(roots, prec);
        if let Some(coefficients) = round_to_integers(&poly) {
            debug_assert_eq!(coefficients.len(), forms.len() + 1);
            debug_assert!(coefficients.last().unwrap().is_one());
            return Ok(ClassPolynomial {
                d,
                kind,
                coefficients,
            });
        }
        prec = prec * 3 / 2;
    }
    Err(Error::PrecisionExhausted)
}

/// Evaluates the invariant at every reduced form's CM point.  Evaluations
/// are independent and run in parallel; every operation is correctly
/// rounded, so the results do not depend on scheduling.
fn invariant_roots(d: i64, forms: &[QuadraticForm], kind: PolyKind, prec: usize) -> Vec<Cx> {
    forms
        .par_iter()
        .map_init(
            || Consts::new().expect("constants cache"),
            |cc, q| {
                let (a, b) = match kind {
                    PolyKind::J => (q.a, q.b),
                    PolyKind::Gamma2 => gamma2_representative(q),
                    PolyKind::External => unreachable!("external polynomials are not computed"),
                };
                let tau = upper_half_point(a, b, d, prec);
                let v = modular_values(&tau, prec, cc);
                match kind {
                    PolyKind::J => v.j,
                    PolyKind::Gamma2 => v.gamma2,
                    PolyKind::External => unreachable!(),
                }
            },
        )
        .collect()
}

/// τ = (−b + i√|D|)/(2a).
fn upper_half_point(a: i64, b: i64, d: i64, prec: usize) -> Cx {
    let two_a = BigFloat::from_u64(2 * a as u64, prec);
    let re = bigint_to_bigfloat(&BigInt::from(-b)).div(&two_a, prec, RM);
    let im = BigFloat::from_u64(d.unsigned_abs(), prec)
        .sqrt(prec, RM)
        .div(&two_a, prec, RM);
    Cx::new(re, im)
}

/// Picks the γ₂-compatible representative (a′, b′) of a reduced form:
/// move to an equivalent form with 3 ∤ a′, then shift b′ by multiples of
/// 2a′ until 3 | b′.  The cube of γ₂ at the resulting point is the j-value
/// of the class, which the cube-multiset tests assert for every D used.
fn gamma2_representative(q: &QuadraticForm) -> (i64, i64) {
    let (a1, b1) = if q.a % 3 != 0 {
        (q.a, q.b)
    } else if q.c % 3 != 0 {
        (q.c, -q.b)
    } else {
        // 3 | a and 3 | c force 3 ∤ b (as 3 ∤ D), so a + b + c ≢ 0 (mod 3).
        (q.a + q.b + q.c, -(q.b + 2 * q.a))
    };
    for k in [0i64, 1, -1, 2, -2] {
        let b2 = b1 + 2 * a1 * k;
        if b2 % 3 == 0 {
            return (a1, b2);
        }
    }
    unreachable!("2a′ is invertible mod 3, so some shift lands on 3 | b′")
}

/// Multiplies out Π (X − rᵢ) with a balanced tree in a fixed order, so the
/// result is identical across runs and thread counts.
fn linear_product_tree(roots: Vec<Cx>, prec: usize) -> Vec<Cx> {
    let mut level: Vec<Vec<Cx>> = roots
        .into_iter()
        .map(|r| vec![r.neg(), Cx::one(prec)])
        .collect();
    if level.is_empty() {
        return vec![Cx::one(prec)];
    }
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| {
                if pair.len() == 2 {
                    poly_mul_cx(&pair[0], &pair[1], prec)
                } else {
                    pair[0].clone()
                }
            })
            .collect();
    }
    level.pop().unwrap()
}

fn poly_mul_cx(a: &[Cx], b: &[Cx], prec: usize) -> Vec<Cx> {
    let mut out = vec![Cx::from_u64(0, prec); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&ai.mul(bj, prec), prec);
        }
    }
    out
}

/// Rounds every coefficient to the nearest integer, requiring distance
/// < 1/4 on the real parts and imaginary parts that vanish; `None` demands
/// escalation.
fn round_to_integers(poly: &[Cx]) -> Option<Vec<BigInt>> {
    let mut out = Vec::with_capacity(poly.len());
    for c in poly {
        let (re, ok_re) = round_nearest(&c.re);
        let (im, ok_im) = round_nearest(&c.im);
        if !ok_re || !ok_im || !im.is_zero() {
            return None;
        }
        out.push(re);
    }
    Some(out)
}

/// Maps a root expressed in `kind` to the corresponding j-invariant mod p:
/// identity for J, x³ for γ₂, (x²⁴ − 16)³/x²⁴ for Weber f.
pub fn invariant_root_to_j(kind: Invariant, x: &BigUint, p: &BigUint) -> Result<BigUint> {
    let x = x % p;
    match kind {
        Invariant::J => Ok(x),
        Invariant::Gamma2 => Ok(mod_pow(&x, &BigUint::from(3u8), p)),
        Invariant::WeberF => {
            if x.is_zero() {
                return Err(Error::Domain("weber-f root must be nonzero"));
            }
            let t = mod_pow(&x, &BigUint::from(24u8), p);
            let sixteen = BigUint::from(16u8) % p;
            let num = if t >= sixteen {
                &t - &sixteen
            } else {
                &t + p - &sixteen
            };
            let cube = mod_pow(&(num % p), &BigUint::from(3u8), p);
            Ok((cube * invert_mod(&t, p)?) % p)
        }
    }
}

/// One root of `poly` mod p, by gcd(X^p − X, ·) and seeded equal-degree
/// splitting; `NoRootModP` when there is none.  The returned residue is
/// re-checked against the polynomial unconditionally.
pub fn find_root_mod_p(poly: &ClassPolynomial, p: &BigUint, seed: u64) -> Result<BigUint> {
    polymod::find_root(&poly.coefficients, p, seed)
}

/// Whether `poly` splits into deg(poly) distinct linear factors mod p.
pub fn split_completely_check(poly: &ClassPolynomial, p: &BigUint) -> bool {
    polymod::splits_completely(&poly.coefficients, p)
}

/// Degrees of a modular relation Ψ(f, j) in f and in j.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModularRelation {
    pub deg_in_f: u32,
    pub deg_in_j: u32,
}

/// The height-reduction factor r(f) = deg_f / deg_j as an exact rational.
pub fn reduction_factor(rel: &ModularRelation) -> Ratio<u32> {
    assert!(rel.deg_in_f >= 1 && rel.deg_in_j >= 1, "degrees must be >= 1");
    Ratio::new(rel.deg_in_f, rel.deg_in_j)
}

/// The gonality bound on reduction factors: r ≤ 800/7.
pub fn satisfies_gonality_bound(r: &Ratio<u32>) -> bool {
    *r <= Ratio::new(800, 7)
}

// ---------------------------------------------------------------------------
// Cache file format: per record, a header line `D kind degree` followed by
// degree+1 decimal coefficients, one per line, ascending.  Exact integers
// only.

/// Writes one cache record.
pub fn write_cache_record<W: Write>(w: &mut W, poly: &ClassPolynomial) -> io::Result<()> {
    writeln!(w, "{} {} {}", poly.d, poly.kind.token(), poly.degree())?;
    for c in &poly.coefficients {
        writeln!(w, "{c}")?;
    }
    Ok(())
}

/// Parses every record in a cache stream.
pub fn parse_cache_records<R: BufRead>(r: R) -> io::Result<Vec<ClassPolynomial>> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = r.lines();
    let mut out = Vec::new();
    while let Some(header) = lines.next() {
        let header = header?;
        if header.trim().is_empty() {
            continue;
        }
        let mut it = header.split_whitespace();
        let (d, kind, degree) = match (it.next(), it.next(), it.next(), it.next()) {
            (Some(d), Some(k), Some(deg), None) => {
                let d: i64 = d.parse().map_err(|_| bad(format!("bad discriminant in {header:?}")))?;
                let kind = PolyKind::from_token(k)
                    .ok_or_else(|| bad(format!("unknown kind in {header:?}")))?;
                let degree: usize = deg
                    .parse()
                    .map_err(|_| bad(format!("bad degree in {header:?}")))?;
                (d, kind, degree)
            }
            _ => return Err(bad(format!("malformed header {header:?}"))),
        };
        let mut coefficients = Vec::with_capacity(degree + 1);
        for _ in 0..=degree {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("record {d} truncated")))??;
            let c: BigInt = line
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad coefficient {line:?} in record {d}")))?;
            coefficients.push(c);
        }
        if !coefficients.last().is_some_and(|c| c.is_one()) {
            return Err(bad(format!("record {d} is not monic")));
        }
        out.push(ClassPolynomial {
            d,
            kind,
            coefficients,
        });
    }
    Ok(out)
}

/// Looks up a (D, kind) record in a cache file; a missing file is an
/// ordinary miss.
pub fn cache_lookup(path: &Path, d: i64, kind: PolyKind) -> io::Result<Option<ClassPolynomial>> {
    let file = match std::fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e),
    };
    let records = parse_cache_records(io::BufReader::new(file))?;
    Ok(records.into_iter().find(|r| r.d == d && r.kind == kind))
}

/// Appends one record to a cache file, creating it if needed.
pub fn cache_append(path: &Path, poly: &ClassPolynomial) -> io::Result<()> {
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    write_cache_record(&mut file, poly)
}

/// Evaluates an integer polynomial at a complex point (Horner), for the
/// root-quality assertions in tests.
#[cfg(test)]
fn eval_poly_cx(coeffs: &[BigInt], z: &Cx, prec: usize) -> Cx {
    let mut acc = Cx::from_u64(0, prec);
    for c in coeffs.iter().rev() {
        let cf = Cx::new(bigint_to_bigfloat(c), BigFloat::from_u64(0, prec));
        acc = acc.mul(z, prec).add(&cf, prec);
    }
    acc
}
