//! The low-degree polynomial attached to each spectrum input, and the two
//! independent routes from it to the sum values.
//!
//! For d = s(sqrt|F| - 1) + 1 the whole-field character sum at `a` collapses
//! to a count: W(a) = (Z(a) - 1) * sqrt|F|, where Z(a) is the number of
//! roots of
//!
//! ```text
//!   g_a(x) = x^(2s-1) - a x^s - tau(a) x^(s-1) + 1
//! ```
//!
//! on the unit circle of F.  This module builds g_a, counts circle and
//! subfield roots by gcd ladders (never by enumeration), verifies the
//! identity against the enumerated sums, and classifies where all seven
//! roots of the s = 4 polynomial live — by explicit factorization when g_a
//! is inseparable (a on the unit circle) and by Frobenius/circle gcd
//! ladders when it is separable.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::poly::{self, Poly};
use crate::spectra::{self, SpectrumReport};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

/// The polynomial x^(2s-1) - a x^s - tau(a) x^(s-1) + 1 over a's field.
pub fn niho_polynomial(ctx: &Arc<FieldCtx>, s: u64, a: FieldElem) -> Result<Poly> {
    ctx.ensure(a)?;
    if s == 0 {
        return Err(Error::InvalidParameter("s must be positive".into()));
    }
    if s > 1 << 16 {
        return Err(Error::InvalidParameter(format!(
            "degree 2*{} - 1 is out of the supported range",
            s
        )));
    }
    let tau_a = ctx.tau(a)?;
    let s = s as usize;
    let mut cs = vec![0u128; 2 * s];
    cs[2 * s - 1] = ctx.radd(cs[2 * s - 1], 1);
    cs[s] = ctx.rsub(cs[s], a.raw());
    cs[s - 1] = ctx.rsub(cs[s - 1], tau_a.raw());
    cs[0] = ctx.radd(cs[0], 1);
    Ok(Poly::from_raw(ctx.clone(), cs))
}

/// The s = 4 member: in characteristic 2, x^7 + a x^4 + tau(a) x^3 + 1.
pub fn key_polynomial(ctx: &Arc<FieldCtx>, a: FieldElem) -> Result<Poly> {
    niho_polynomial(ctx, 4, a)
}

/// Number of distinct roots of `g` on the unit circle of its field,
/// computed as deg gcd(g, x^(sqrt|F| + 1) - 1) via a Frobenius power chain.
pub fn count_unit_circle_roots(g: &Poly) -> Result<u32> {
    circle_root_count(g, 1)
}

/// Distinct roots of `g` on the unit circle of the degree-k extension:
/// common roots with x^(sqrt|F|^k + 1) - 1.  The exponent is never
/// materialized; x^(sqrt|F|^k) mod g is built by k successive powers.
pub fn circle_root_count(g: &Poly, k: u32) -> Result<u32> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if g.degree() == Some(0) {
        return Ok(0);
    }
    let ctx = g.ctx().clone();
    let q = ctx.half_order()?;
    let g = g.monic();
    let y = Poly::x_pow_q_chain(&g, q, k)?;
    // x^(Q^k + 1) - 1 mod g.
    let h = y.mul(&Poly::x(&ctx)).rem(&g)?.sub(&Poly::one(&ctx));
    Ok(Poly::gcd(&g, &h).degree().unwrap_or(0) as u32)
}

/// Distinct roots of `g` lying in the degree-k extension field of its
/// context: common roots with x^(|F|^k) - x.
pub fn subfield_root_count(g: &Poly, k: u32) -> Result<u32> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if g.degree() == Some(0) {
        return Ok(0);
    }
    let ctx = g.ctx().clone();
    let g = g.monic();
    let y = Poly::x_pow_q_chain(&g, ctx.order(), k)?;
    let h = y.sub(&Poly::x(&ctx).rem(&g)?);
    Ok(Poly::gcd(&g, &h).degree().unwrap_or(0) as u32)
}

/// Outcome of checking W(a) = (Z(a) - 1) * sqrt|F| over all of F*.
#[derive(Clone, Debug, Serialize)]
pub struct RootCountReport {
    pub field: String,
    pub s: u64,
    pub d: u64,
    pub sqrt_order: u64,
    pub valid_exponent: bool,
    pub inputs_checked: u64,
    /// Distinct-circle-root count -> how many a in F* attain it.
    pub root_count_multiset: BTreeMap<u32, u64>,
    pub spectrum: SpectrumReport,
}

/// For every a in F*, compare the enumerated character sum against
/// (Z(a) - 1) * sqrt|F| with Z(a) counted by the gcd ladder.  The two sides
/// are computed by unrelated algorithms; any mismatch is an error.
pub fn verify_root_count_identity(ctx: &Arc<FieldCtx>, s: u64) -> Result<RootCountReport> {
    let exp = spectra::niho_exponent(ctx, s)?;
    let q = ctx.half_order()?;
    if ctx.order() > u64::MAX as u128 {
        return Err(Error::UnsupportedField(format!(
            "{} is too large to enumerate sums over",
            ctx
        )));
    }
    let zero_value = spectra::weil_sum(ctx, exp.d, ctx.zero())?
        .value()
        .ok_or(Error::IrrationalSum)?;
    let order = ctx.order() as u64;
    let pairs: Vec<(i64, u32)> = (1..order)
        .into_par_iter()
        .map(|av| -> Result<(i64, u32)> {
            let a = ctx.elem_from_raw(av as u128).expect("in range");
            let w = spectra::weil_sum(ctx, exp.d, a)?
                .value()
                .ok_or(Error::IrrationalSum)?;
            let g = niho_polynomial(ctx, s, a)?;
            let z = count_unit_circle_roots(&g)?;
            let predicted = (z as i64 - 1) * q as i64;
            if w != predicted {
                return Err(Error::CheckFailed(format!(
                    "a = {:?}: enumerated sum {} but {} circle roots predict {}",
                    ctx.coeffs(a),
                    w,
                    z,
                    predicted
                )));
            }
            Ok((w, z))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut multiset: BTreeMap<u32, u64> = BTreeMap::new();
    for &(_, z) in &pairs {
        *multiset.entry(z).or_insert(0) += 1;
    }
    let spectrum = SpectrumReport::assemble(
        ctx,
        exp.d,
        Some(zero_value),
        pairs.iter().map(|&(w, _)| w).collect(),
    );
    Ok(RootCountReport {
        field: ctx.descriptor(),
        s,
        d: exp.d,
        sqrt_order: q as u64,
        valid_exponent: exp.valid,
        inputs_checked: order - 1,
        root_count_multiset: multiset,
        spectrum,
    })
}

/// Which explicit factorization applies when the s = 4 polynomial is
/// inseparable (a on the unit circle, characteristic 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InseparableCase {
    /// a = 1: the polynomial is (x + 1)^5 (x^2 + x + 1).
    AEqualsOne,
    /// a != 1, [F : F_4] even: quadruple root plus the unique on-circle cube
    /// root of a; the other two cube roots land in F off the circle.
    OneCubeRootOnCircle,
    /// a != 1, [F : F_4] odd, a a cube in the circle group: quadruple root
    /// plus all three cube roots on the circle.
    ThreeCubeRootsOnCircle,
    /// a != 1, [F : F_4] odd, a not a cube in the circle group: only the
    /// quadruple root lies on the circle; the cube roots sit on the circle
    /// of the cubic extension.
    NoCubeRootOnCircle,
}

/// Where the roots of the s = 4 polynomial live, bucketed by the smallest
/// field and circle containing each distinct root.
#[derive(Clone, Debug, Serialize)]
pub struct RootProfile {
    pub field: String,
    /// Prime-field digits of a, constant first.
    pub a: Vec<u64>,
    pub separable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inseparable_case: Option<InseparableCase>,
    /// Z: distinct roots on the unit circle of F.
    pub circle_roots: u32,
    /// Distinct roots in F but off the circle.
    pub field_roots_off_circle: u32,
    /// Distinct roots in the quadratic extension, outside F.
    pub quadratic_roots: u32,
    /// Distinct roots on the unit circle of the cubic extension, outside F.
    pub cubic_circle_roots: u32,
    /// Distinct roots in the cubic extension, off its circle and outside F.
    pub cubic_interior_roots: u32,
    /// Distinct roots on the unit circle of the quintic extension.
    pub quintic_circle_roots: u32,
    /// Distinct roots on the unit circle of the septic extension.
    pub septic_circle_roots: u32,
    /// Multiplicities of the distinct roots, descending.
    pub multiplicities: Vec<u32>,
    /// Sizes of the conjugate-reciprocal orbits on the distinct roots,
    /// ascending.
    pub orbit_signature: Vec<u32>,
    pub distinct_roots: u32,
    /// a = 0 sits outside the spectrum analysis (it is not a sum input).
    pub out_of_scope: bool,
}

impl RootProfile {
    pub fn orbit_count(&self) -> usize {
        self.orbit_signature.len()
    }
}

fn base_profile(ctx: &FieldCtx, a: FieldElem) -> RootProfile {
    RootProfile {
        field: ctx.descriptor(),
        a: ctx.coeffs(a),
        separable: true,
        inseparable_case: None,
        circle_roots: 0,
        field_roots_off_circle: 0,
        quadratic_roots: 0,
        cubic_circle_roots: 0,
        cubic_interior_roots: 0,
        quintic_circle_roots: 0,
        septic_circle_roots: 0,
        multiplicities: Vec::new(),
        orbit_signature: Vec::new(),
        distinct_roots: 0,
        out_of_scope: false,
    }
}

/// Explicit root classification of the s = 4 polynomial for a on the unit
/// circle, where it is inseparable.  Every branch verifies its claimed
/// factorization by multiplying it back out.
pub fn classify_inseparable(ctx: &Arc<FieldCtx>, a: FieldElem) -> Result<RootProfile> {
    ctx.ensure(a)?;
    if ctx.characteristic() != 2 {
        return Err(Error::OddCharacteristic(ctx.characteristic()));
    }
    let q = ctx.half_order()?;
    if a.is_zero() || ctx.rpow(a.raw(), q + 1) != 1 {
        return Err(Error::NotOnUnitCircle(format!(
            "a = {:?} in {}",
            ctx.coeffs(a),
            ctx
        )));
    }
    let g = key_polynomial(ctx, a)?;
    let half_rel = ctx.degree() / 2; // [F : F_4] = n/2 since F_4 has degree 2
    let mut profile = base_profile(ctx, a);
    profile.separable = false;

    if a == ctx.one() {
        // g = (x + 1)^5 (x^2 + x + 1); verify by expansion.
        let lin = Poly::from_prime_coeffs(ctx, &[1, 1])?;
        let quad = Poly::from_prime_coeffs(ctx, &[1, 1, 1])?;
        let mut prod = quad.clone();
        for _ in 0..5 {
            prod = prod.mul(&lin);
        }
        if prod != g {
            return Err(Error::CheckFailed(
                "claimed factorization of the a = 1 polynomial does not expand back".into(),
            ));
        }
        // The primitive cube roots of unity lie on the circle iff 3 divides
        // sqrt|F| + 1, i.e. iff [F : F_4] is odd.
        let omega = ctx.pow(ctx.alpha()?, (ctx.order() - 1) / 3);
        let omega_on_circle = ctx.rpow(omega.raw(), q + 1) == 1;
        if omega_on_circle != (half_rel % 2 == 1) {
            return Err(Error::CheckFailed(
                "cube-root-of-unity circle membership contradicts the degree parity".into(),
            ));
        }
        profile.inseparable_case = Some(InseparableCase::AEqualsOne);
        profile.multiplicities = vec![5, 1, 1];
        profile.distinct_roots = 3;
        if omega_on_circle {
            profile.circle_roots = 3;
            profile.field_roots_off_circle = 0;
            // All three roots are circle points, each fixed by conjugation.
            profile.orbit_signature = vec![1, 1, 1];
        } else {
            profile.circle_roots = 1;
            profile.field_roots_off_circle = 2;
            // 1 is fixed; the two cube roots of unity swap.
            profile.orbit_signature = vec![1, 2];
        }
        return Ok(profile);
    }

    // a != 1 on the circle: g = (x^4 + a^-1)(x^3 + a) = (x + r0)^4 (x^3 + a)
    // with r0 the fourth root of a^-1.
    let inv_a = ctx.inv(a)?;
    let r0 = ctx.sqrt(ctx.sqrt(inv_a)?)?;
    if ctx.pow(r0, 4) != inv_a {
        return Err(Error::CheckFailed("fourth root reconstruction failed".into()));
    }
    let quartic = Poly::from_elems(ctx, &[inv_a, ctx.zero(), ctx.zero(), ctx.zero(), ctx.one()])?;
    let cubic = Poly::from_elems(ctx, &[a, ctx.zero(), ctx.zero(), ctx.one()])?;
    if quartic.mul(&cubic) != g {
        return Err(Error::CheckFailed(
            "claimed inseparable factorization does not expand back".into(),
        ));
    }
    if ctx.rpow(r0.raw(), q + 1) != 1 {
        return Err(Error::CheckFailed(
            "the quadruple root left the unit circle".into(),
        ));
    }
    profile.multiplicities = vec![4, 1, 1, 1];
    profile.distinct_roots = 4;

    if half_rel % 2 == 0 {
        // 3 does not divide the circle order Q + 1, so cubing is a bijection
        // on the circle: exactly one cube root of a lies there.
        debug_assert_eq!((q + 1) % 3, 2);
        let c = ctx.pow(a, (q + 2) / 3);
        if ctx.pow(c, 3) != a || ctx.rpow(c.raw(), q + 1) != 1 {
            return Err(Error::CheckFailed(
                "on-circle cube root construction failed".into(),
            ));
        }
        profile.inseparable_case = Some(InseparableCase::OneCubeRootOnCircle);
        profile.circle_roots = 2; // r0 and c
        profile.field_roots_off_circle = 2; // c * omega, c * omega^2
        profile.orbit_signature = vec![1, 1, 2];
    } else if ctx.rpow(a.raw(), (q + 1) / 3) == 1 {
        // a is a cube in the circle group; all three cube roots lie on it.
        let cubic_eq = Poly::from_elems(ctx, &[a, ctx.zero(), ctx.zero(), ctx.one()])?;
        let c = poly::find_any_root(ctx, &cubic_eq, a.raw() as u64 ^ 0x6b65)?;
        if ctx.pow(c, 3) != a || ctx.rpow(c.raw(), q + 1) != 1 {
            return Err(Error::CheckFailed("cube root not on the circle".into()));
        }
        profile.inseparable_case = Some(InseparableCase::ThreeCubeRootsOnCircle);
        profile.circle_roots = 4;
        profile.orbit_signature = vec![1, 1, 1, 1];
    } else {
        // a is not a cube in F: the cubic factor is irreducible here and its
        // roots sit on the circle of the cubic extension.
        if !poly::is_irreducible(&cubic)? {
            return Err(Error::CheckFailed(
                "cubic factor of a non-cube split unexpectedly".into(),
            ));
        }
        // Honest count on the extension circle: r0 plus the three others.
        if circle_root_count(&g, 3)? != 4 {
            return Err(Error::CheckFailed(
                "cubic-extension circle count disagrees with the classification".into(),
            ));
        }
        profile.inseparable_case = Some(InseparableCase::NoCubeRootOnCircle);
        profile.circle_roots = 1;
        profile.cubic_circle_roots = 3;
        profile.orbit_signature = vec![1, 3];
    }
    Ok(profile)
}

/// Locate all seven roots of the separable s = 4 polynomial by gcd ladders
/// against subfield and circle polynomials of the extensions of degree up
/// to 7 — no root is ever materialized.  Requires a off the unit circle.
pub fn root_field_profile(ctx: &Arc<FieldCtx>, a: FieldElem) -> Result<RootProfile> {
    ctx.ensure(a)?;
    if ctx.characteristic() != 2 {
        return Err(Error::OddCharacteristic(ctx.characteristic()));
    }
    let q = ctx.half_order()?;
    if !a.is_zero() && ctx.rpow(a.raw(), q + 1) == 1 {
        return Err(Error::Inseparable(format!(
            "a = {:?} lies on the unit circle; use the explicit classification",
            ctx.coeffs(a)
        )));
    }
    let g = key_polynomial(ctx, a)?;
    if Poly::gcd(&g, &g.derivative()).degree() != Some(0) {
        return Err(Error::CheckFailed(
            "polynomial with a off the circle must be separable".into(),
        ));
    }

    let z1 = circle_root_count(&g, 1)?;
    let f1 = subfield_root_count(&g, 1)?;
    let f2 = subfield_root_count(&g, 2)?;
    let f3 = subfield_root_count(&g, 3)?;
    let u3 = circle_root_count(&g, 3)?;
    let u5 = circle_root_count(&g, 5)?;
    let u7 = circle_root_count(&g, 7)?;

    // The circles of odd-degree extensions pairwise intersect exactly in the
    // base circle, and each extension field meets the base circle likewise,
    // so the buckets below are disjoint and exhaustive for degree 7.
    let mut profile = base_profile(ctx, a);
    profile.out_of_scope = a.is_zero();
    profile.circle_roots = z1;
    profile.field_roots_off_circle = f1 - z1;
    profile.quadratic_roots = f2 - f1;
    profile.cubic_circle_roots = u3 - z1;
    profile.cubic_interior_roots = f3 - f1 - (u3 - z1);
    profile.quintic_circle_roots = u5 - z1;
    profile.septic_circle_roots = u7 - z1;
    profile.multiplicities = vec![1; 7];
    profile.distinct_roots = 7;

    // Orbit sizes under the conjugate-reciprocal map: a root generating a
    // degree-e extension gives an orbit of size e if e is odd and the root
    // lies on the degree-e circle, and 2e otherwise.
    let buckets: [(u32, u32); 7] = [
        (profile.circle_roots, 1),
        (profile.field_roots_off_circle, 2),
        (profile.quadratic_roots, 4),
        (profile.cubic_circle_roots, 3),
        (profile.cubic_interior_roots, 6),
        (profile.quintic_circle_roots, 5),
        (profile.septic_circle_roots, 7),
    ];
    let mut signature = Vec::new();
    let mut covered = 0u32;
    for (count, orbit) in buckets {
        if count % orbit != 0 {
            return Err(Error::CheckFailed(format!(
                "{} roots cannot split into orbits of size {}",
                count, orbit
            )));
        }
        for _ in 0..count / orbit {
            signature.push(orbit);
        }
        covered += count;
    }
    if covered != 7 {
        return Err(Error::CheckFailed(format!(
            "root buckets cover {} of 7 roots",
            covered
        )));
    }
    signature.sort_unstable();
    profile.orbit_signature = signature;
    Ok(profile)
}
