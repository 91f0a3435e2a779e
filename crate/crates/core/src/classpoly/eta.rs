//! Dedekind eta and the modular invariants f, γ₂, j on the upper half-plane.
//!
//! Eta is evaluated by the pentagonal-number series
//!
//! ```text
//! η(τ) = e^{πiτ/12} · (1 + Σ_{n≥1} (−1)ⁿ (q^{n(3n−1)/2} + q^{n(3n+1)/2})),
//! q = e^{2πiτ},
//! ```
//!
//! whose exponents grow quadratically, so roughly `√prec` terms suffice.
//! All constants (π and the root of unity ζ₄₈⁻¹) are computed at the working
//! precision of the call — never cached at a lower one.

use astro_float::{BigFloat, Consts};

use super::cfloat::{exponent_of, Cx, RM};

/// Guard bits added on top of the requested precision.
const GUARD: usize = 32;

/// Dedekind eta at `tau` (which must have positive imaginary part),
/// to `prec` significant bits.
pub(crate) fn eta(tau: &Cx, prec: usize, cc: &mut Consts) -> Cx {
    assert!(
        !tau.im.is_negative() && !tau.im.is_zero(),
        "eta requires Im tau > 0"
    );
    let wp = prec + GUARD;
    let pi = cc.pi(wp, RM);
    let twelve = BigFloat::from_u64(12, wp);

    // w = e^{πiτ/12}: magnitude e^{−π·Im τ/12}, phase π·Re τ/12.
    let phase = pi.mul(&tau.re, wp, RM).div(&twelve, wp, RM);
    let decay = pi.mul(&tau.im, wp, RM).div(&twelve, wp, RM);
    let mag = decay.neg().exp(wp, RM, cc);
    let w = Cx::new(
        mag.mul(&phase.cos(wp, RM, cc), wp, RM),
        mag.mul(&phase.sin(wp, RM, cc), wp, RM),
    );
    let q = w.powi(24, wp);

    // Pentagonal exponents: n(3n−1)/2 and n(3n+1)/2.  With
    // qn = qⁿ and q2 = q^{2n−1} maintained incrementally, multiplying the
    // running power `cur` by q2 advances it from q^{(n−1)(3n+2)/2} (the
    // previous second exponent) to q^{n(3n−1)/2}, and by qn on to
    // q^{n(3n+1)/2}.
    let one = Cx::one(wp);
    let qq = q.mul(&q, wp);
    let mut qn = q.clone();
    let mut q2 = q.clone();
    let mut cur = one.clone();
    let mut sum = one;
    let mut negative = true;
    // The sum is 1 + O(q), so an absolute cutoff on term magnitude is a
    // valid relative cutoff for the total.
    let threshold = -((prec + 16) as i64);
    loop {
        cur = cur.mul(&q2, wp);
        let first = cur.clone();
        cur = cur.mul(&qn, wp);
        let term = first.add(&cur, wp);
        sum = if negative {
            sum.sub(&term, wp)
        } else {
            sum.add(&term, wp)
        };
        if exponent_of(&term.re).max(exponent_of(&term.im)) < threshold {
            break;
        }
        negative = !negative;
        qn = qn.mul(&q, wp);
        q2 = q2.mul(&qq, wp);
    }
    w.mul(&sum, wp)
}

/// The three modular invariants evaluated at one point.
pub(crate) struct ModularValues {
    /// Weber f.  Read only by the identity tests; the construction itself
    /// consumes γ₂ and j.
    #[cfg_attr(not(test), allow(dead_code))]
    pub f: Cx,
    /// Cube root of j: γ₂ = (f²⁴ − 16)/f⁸.
    pub gamma2: Cx,
    /// Klein j.
    pub j: Cx,
}

/// Evaluates f, γ₂ and j at `tau` via `f = ζ₄₈⁻¹ · η((τ+1)/2)/η(τ)`.
pub(crate) fn modular_values(tau: &Cx, prec: usize, cc: &mut Consts) -> ModularValues {
    let wp = prec + GUARD;
    let pi = cc.pi(wp, RM);

    // ζ₄₈⁻¹ = e^{−πi/24}
    let angle = pi.div(&BigFloat::from_u64(24, wp), wp, RM);
    let zeta48_inv = Cx::new(
        angle.cos(wp, RM, cc),
        angle.sin(wp, RM, cc).neg(),
    );

    let two = BigFloat::from_u64(2, wp);
    let tau_shifted = Cx::new(
        tau.re.add(&BigFloat::from_u64(1, wp), wp, RM).div(&two, wp, RM),
        tau.im.div(&two, wp, RM),
    );

    let e_shifted = eta(&tau_shifted, wp, cc);
    let e_tau = eta(tau, wp, cc);
    let f = zeta48_inv.mul(&e_shifted.div(&e_tau, wp), wp);

    let f8 = f.powi(8, wp);
    let f24 = f8.powi(3, wp);
    let sixteen = Cx::from_u64(16, wp);
    let gamma2 = f24.sub(&sixteen, wp).div(&f8, wp);
    let j = gamma2.powi(3, wp);
    ModularValues { f, gamma2, j }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classpoly::cfloat::{biguint_to_bigfloat, round_nearest};
    use num_bigint::{BigInt, BigUint};
    use std::str::FromStr;

    fn bf(num: u64, den: u64, p: usize) -> BigFloat {
        BigFloat::from_u64(num, p).div(&BigFloat::from_u64(den, p), p, RM)
    }

    fn assert_small(x: &BigFloat, bound: i64, what: &str) {
        assert!(
            exponent_of(x) < bound,
            "{what}: exponent {} >= {bound}",
            exponent_of(x)
        );
    }

    #[test]
    fn eta_at_i_matches_reference_digits() {
        // η(i) = Γ(1/4)/(2π^{3/4}); reference scaled by 2^192:
        let want = BigInt::from_str(
            "4822229131651055983036598800422259857820653764724016124827",
        )
        .unwrap();
        let p = 220;
        let mut cc = Consts::new().unwrap();
        let i = Cx::new(BigFloat::from_u64(0, p), BigFloat::from_u64(1, p));
        let e = eta(&i, p, &mut cc);
        // The scaled value is irrational (fractional part ~0.70), so only
        // the rounded integer is compared, not the margin flag.
        let scale = biguint_to_bigfloat(&(BigUint::from(1u8) << 192));
        let (n, _) = round_nearest(&e.re.mul(&scale, p, RM));
        assert_eq!(n, want);
        assert_small(&e.im, -200, "Im eta(i)");
    }

    #[test]
    fn eta_translation_identity() {
        // η(τ+1) = e^{πi/12} η(τ) at τ = 3/10 + 4i/5.
        let p = 200;
        let mut cc = Consts::new().unwrap();
        let tau = Cx::new(bf(3, 10, p), bf(4, 5, p));
        let tau1 = Cx::new(tau.re.add(&BigFloat::from_u64(1, p), p, RM), tau.im.clone());
        let lhs = eta(&tau1, p, &mut cc);
        let angle = cc.pi(p, RM).div(&BigFloat::from_u64(12, p), p, RM);
        let phase = Cx::new(angle.cos(p, RM, &mut cc), angle.sin(p, RM, &mut cc));
        let rhs = phase.mul(&eta(&tau, p, &mut cc), p);
        let d = lhs.sub(&rhs, p);
        assert_small(&d.re, -190, "Re of translation defect");
        assert_small(&d.im, -190, "Im of translation defect");
    }

    #[test]
    fn eta_inversion_identity() {
        // η(−1/τ) = √(−iτ) η(τ) at τ = 3/10 + 4i/5.
        let p = 200;
        let mut cc = Consts::new().unwrap();
        let tau = Cx::new(bf(3, 10, p), bf(4, 5, p));
        let minus_inv = Cx::one(p).neg().div(&tau, p);
        let lhs = eta(&minus_inv, p, &mut cc);
        // −iτ = Im τ − i·Re τ has positive real part, so the principal
        // square root formula applies.
        let minus_i_tau = Cx::new(tau.im.clone(), tau.re.neg());
        let rhs = minus_i_tau
            .sqrt_right_half(p, &mut cc)
            .mul(&eta(&tau, p, &mut cc), p);
        let d = lhs.sub(&rhs, p);
        assert_small(&d.re, -190, "Re of inversion defect");
        assert_small(&d.im, -190, "Im of inversion defect");
    }

    #[test]
    fn invariants_at_cm_points() {
        let p = 256;
        let mut cc = Consts::new().unwrap();

        // τ = i: j = 1728, γ₂ = 12, f⁴ = 2.
        let i = Cx::new(BigFloat::from_u64(0, p), BigFloat::from_u64(1, p));
        let v = modular_values(&i, p, &mut cc);
        let (j, ok) = round_nearest(&v.j.re);
        assert!(ok);
        assert_eq!(j, BigInt::from(1728));
        assert_small(&v.j.im, -200, "Im j(i)");
        let (g2, ok) = round_nearest(&v.gamma2.re);
        assert!(ok);
        assert_eq!(g2, BigInt::from(12));
        let f4 = v.f.powi(4, p);
        let (f4n, ok) = round_nearest(&f4.re);
        assert!(ok);
        assert_eq!(f4n, BigInt::from(2));

        // τ = i√2: j = 8000.
        let sqrt2 = BigFloat::from_u64(2, p).sqrt(p, RM);
        let v = modular_values(&Cx::new(BigFloat::from_u64(0, p), sqrt2), p, &mut cc);
        let (j, ok) = round_nearest(&v.j.re);
        assert!(ok);
        assert_eq!(j, BigInt::from(8000));

        // τ = (1 + i√3)/2: j = 0.
        let half = bf(1, 2, p);
        let im = BigFloat::from_u64(3, p).sqrt(p, RM).div(&BigFloat::from_u64(2, p), p, RM);
        let v = modular_values(&Cx::new(half, im), p, &mut cc);
        let (j, _) = round_nearest(&v.j.re);
        assert_eq!(j, BigInt::from(0));
        assert_small(&v.j.re, -200, "Re j(rho)");
        assert_small(&v.j.im, -200, "Im j(rho)");
    }

    #[test]
    fn weber_identity_links_f_and_j() {
        // (f²⁴ − 16)³ = j · f²⁴ away from the CM points.
        let p = 256;
        let mut cc = Consts::new().unwrap();
        let tau = Cx::new(bf(1, 10, p), bf(6, 5, p));
        let v = modular_values(&tau, p, &mut cc);
        let f24 = v.f.powi(24, p);
        let lhs = f24.sub(&Cx::from_u64(16, p), p).powi(3, p);
        let rhs = v.j.mul(&f24, p);
        let d = lhs.sub(&rhs, p);
        let scale = exponent_of(&rhs.re).max(exponent_of(&rhs.im));
        assert!(exponent_of(&d.re) < scale - 200, "relative Re defect too large");
        assert!(exponent_of(&d.im) < scale - 200, "relative Im defect too large");
    }
}
