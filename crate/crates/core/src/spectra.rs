//! Character sums, Walsh/crosscorrelation spectra, and the derived
//! code-weight and nonlinearity quantities.
//!
//! The central object is the exponential sum over the whole field of
//! psi(x^d - a*x), held as exact per-fiber counts of the trace argument.  In
//! characteristic 2 the sum is always the integer N0 - N1; in odd
//! characteristic it is rational exactly when all nonzero fibers agree, and
//! the fiber counts are reported either way so nothing is rounded.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::numth;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Exponential sum held as trace-fiber counts: `fiber_counts[j]` is the
/// number of x with Tr(x^d - a*x) = j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterSum {
    p: u64,
    fiber_counts: Vec<u64>,
}

impl CharacterSum {
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn fiber_counts(&self) -> &[u64] {
        &self.fiber_counts
    }

    /// Whether the sum is a rational integer: automatic for p = 2, and for
    /// odd p equivalent to all nonzero fibers sharing one count.
    pub fn is_rational(&self) -> bool {
        self.p == 2 || self.fiber_counts[1..].iter().all(|&c| c == self.fiber_counts[1])
    }

    /// The integer value of the sum when it is rational.
    ///
    /// For p = 2 this is N0 - N1.  For odd p with equal nonzero fibers c the
    /// primitive p-th roots of unity sum to -1, giving N0 - c.
    pub fn value(&self) -> Option<i64> {
        if self.p == 2 {
            Some(self.fiber_counts[0] as i64 - self.fiber_counts[1] as i64)
        } else if self.is_rational() {
            Some(self.fiber_counts[0] as i64 - self.fiber_counts[1] as i64)
        } else {
            None
        }
    }
}

/// The sum over all x in F of psi(x^d - a*x), as exact fiber counts.
pub fn weil_sum(ctx: &FieldCtx, d: u64, a: FieldElem) -> Result<CharacterSum> {
    ctx.ensure(a)?;
    if d == 0 {
        return Err(Error::InvalidParameter("exponent must be positive".into()));
    }
    if ctx.order() > u64::MAX as u128 {
        return Err(Error::UnsupportedField(format!(
            "{} is too large to enumerate",
            ctx
        )));
    }
    // Warm the trace table once so the element loop is all O(1) lookups.
    if ctx.characteristic() == 2 && ctx.is_table_backed() {
        ctx.trace_table()?;
    }
    let p = ctx.characteristic();
    let mut fibers = vec![0u64; p as usize];
    let av = a.raw();
    for xv in 0..ctx.order() {
        let arg = ctx.rsub(ctx.rpow(xv, d as u128), ctx.rmul(av, xv));
        fibers[ctx.rtrace(arg) as usize] += 1;
    }
    Ok(CharacterSum {
        p,
        fiber_counts: fibers,
    })
}

/// One line of a spectrum: a value with its multiplicity over F*.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumLine {
    pub value: i64,
    pub count: u64,
}

/// A value scaled against sqrt|F|, kept as an exact (numerator, denominator)
/// pair rather than a quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizedLine {
    pub num: i64,
    pub den: u64,
    pub count: u64,
}

/// A full spectrum over F*, with the a = 0 value kept separate when the
/// underlying sum ranges over the whole field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumReport {
    pub field: String,
    pub d: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_input_value: Option<i64>,
    /// Ascending by value; counts sum to |F| - 1.
    pub lines: Vec<SpectrumLine>,
    /// Present when the field has even degree: values against sqrt|F|.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<Vec<NormalizedLine>>,
}

impl SpectrumReport {
    pub(crate) fn assemble(
        ctx: &FieldCtx,
        d: u64,
        zero: Option<i64>,
        values: Vec<i64>,
    ) -> SpectrumReport {
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        for v in values {
            *counts.entry(v).or_insert(0) += 1;
        }
        let lines: Vec<SpectrumLine> = counts
            .iter()
            .map(|(&value, &count)| SpectrumLine { value, count })
            .collect();
        let normalized = ctx.half_order().ok().map(|q| {
            lines
                .iter()
                .map(|l| NormalizedLine {
                    num: l.value,
                    den: q as u64,
                    count: l.count,
                })
                .collect()
        });
        SpectrumReport {
            field: ctx.descriptor(),
            d,
            zero_input_value: zero,
            lines,
            normalized,
        }
    }

    /// Value -> multiplicity map.
    pub fn counts(&self) -> BTreeMap<i64, u64> {
        self.lines.iter().map(|l| (l.value, l.count)).collect()
    }

    pub fn distinct_values(&self) -> Vec<i64> {
        self.lines.iter().map(|l| l.value).collect()
    }

    pub fn total_count(&self) -> u64 {
        self.lines.iter().map(|l| l.count).sum()
    }

    /// Largest absolute value across the lines and the zero-input value.
    pub fn max_abs(&self) -> u64 {
        self.lines
            .iter()
            .map(|l| l.value.unsigned_abs())
            .chain(self.zero_input_value.map(|v| v.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// Every line value divided by `den`, when all are exactly divisible.
    pub fn scaled_values(&self, den: u64) -> Option<Vec<i64>> {
        if den == 0 {
            return None;
        }
        self.lines
            .iter()
            .map(|l| {
                if l.value % den as i64 == 0 {
                    Some(l.value / den as i64)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum serializes")
    }

    /// CSV with a fixed header, ascending by value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,count\n");
        for l in &self.lines {
            out.push_str(&format!("{},{}\n", l.value, l.count));
        }
        out
    }
}

fn enumerate_values(ctx: &FieldCtx, d: u64) -> Result<(i64, Vec<i64>)> {
    if ctx.order() > u64::MAX as u128 {
        return Err(Error::UnsupportedField(format!(
            "{} is too large to enumerate",
            ctx
        )));
    }
    let zero = weil_sum(ctx, d, ctx.zero())?
        .value()
        .ok_or(Error::IrrationalSum)?;
    let order = ctx.order() as u64;
    let values: Vec<i64> = (1..order)
        .into_par_iter()
        .map(|av| {
            let a = ctx.elem_from_raw(av as u128).expect("in range");
            weil_sum(ctx, d, a)?.value().ok_or(Error::IrrationalSum)
        })
        .collect::<Result<Vec<i64>>>()?;
    // For d coprime to |F*| the map x -> x^d permutes the field, so the
    // a = 0 sum ranges over every character argument equally.
    if numth::gcd_u64(d % (order - 1), order - 1) == 1 && zero != 0 {
        return Err(Error::CheckFailed(format!(
            "zero-input sum {} nonzero for a coprime exponent",
            zero
        )));
    }
    Ok((zero, values))
}

/// The full spectrum of weil_sum values over a in F*, with the a = 0 value
/// reported separately.
pub fn walsh_spectrum(ctx: &FieldCtx, d: u64) -> Result<SpectrumReport> {
    let (zero, values) = enumerate_values(ctx, d)?;
    Ok(SpectrumReport::assemble(ctx, d, Some(zero), values))
}

/// Crosscorrelation spectrum of an m-sequence against its d-decimation:
/// the multiset of weil_sum(a) - 1 over a in F*.  Requires d coprime to
/// |F*| so the decimation is again an m-sequence.
pub fn crosscorrelation_spectrum(ctx: &FieldCtx, d: u64) -> Result<SpectrumReport> {
    let n_mult = (ctx.order() - 1) as u64;
    if numth::gcd_u64(d % n_mult.max(1), n_mult) != 1 {
        return Err(Error::InvalidParameter(format!(
            "decimation {} shares a factor with the period {}",
            d, n_mult
        )));
    }
    let (_, values) = enumerate_values(ctx, d)?;
    let shifted: Vec<i64> = values.into_iter().map(|v| v - 1).collect();
    Ok(SpectrumReport::assemble(ctx, d, None, shifted))
}

/// The exponent family d = s * (sqrt|F| - 1) + 1 with its validity flag
/// gcd(2s - 1, sqrt|F| + 1) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NihoExponent {
    pub s: u64,
    pub d: u64,
    /// Whether the exponent meets the coprimality condition that makes the
    /// number of distinct sum values minimal for its family.
    pub valid: bool,
}

pub fn niho_exponent(ctx: &FieldCtx, s: u64) -> Result<NihoExponent> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be positive".into()));
    }
    let q = ctx.half_order()?;
    let d = (s as u128)
        .checked_mul(q - 1)
        .and_then(|v| v.checked_add(1))
        .filter(|&v| v <= u64::MAX as u128)
        .ok_or_else(|| Error::InvalidParameter("exponent overflows u64".into()))?;
    let valid = if q + 1 <= u64::MAX as u128 {
        numth::gcd_u64((2 * s - 1) % (q as u64 + 1), q as u64 + 1) == 1
    } else {
        return Err(Error::UnsupportedField(format!("{} is too large", ctx)));
    };
    Ok(NihoExponent {
        s,
        d: d as u64,
        valid,
    })
}

/// Whether x^d coincides with a Frobenius power x^(p^k) on all of F,
/// i.e. d is congruent to some p^k modulo |F*|.
pub fn is_degenerate(ctx: &FieldCtx, d: u64) -> bool {
    let n_mult = ctx.order() - 1;
    if n_mult == 1 {
        return true;
    }
    let dm = d as u128 % n_mult;
    let mut cur: u128 = 1;
    for _ in 0..ctx.degree() {
        if cur == dm {
            return true;
        }
        cur = cur * ctx.characteristic() as u128 % n_mult;
    }
    false
}

/// The cyclotomic coset of d modulo |F*|: all exponents giving the same
/// power function up to Frobenius twists, sorted ascending.
pub fn cyclotomic_class(ctx: &FieldCtx, d: u64) -> Vec<u64> {
    let n_mult = ctx.order() - 1;
    let mut out: Vec<u64> = Vec::new();
    let mut cur = d as u128 % n_mult;
    for _ in 0..ctx.degree() {
        if !out.contains(&(cur as u64)) {
            out.push(cur as u64);
        }
        cur = cur * ctx.characteristic() as u128 % n_mult;
    }
    out.sort_unstable();
    out
}

/// Nonlinearity of the power map x -> x^d on a binary field:
/// (|F| - max_a |W(a)|) / 2, the distance to the nearest affine function.
pub fn nonlinearity(ctx: &FieldCtx, d: u64) -> Result<u64> {
    if ctx.characteristic() != 2 {
        return Err(Error::OddCharacteristic(ctx.characteristic()));
    }
    let report = walsh_spectrum(ctx, d)?;
    let max = report.max_abs();
    let order = ctx.order() as u64;
    debug_assert!(max <= order && (order - max) % 2 == 0);
    Ok((order - max) / 2)
}

/// Weight distribution of the cyclic code whose words are
/// c_{a,b}(t) = Tr(a g^t + b g^(dt)) over all (a, b), for a fixed primitive g.
///
/// Derived entirely from the spectrum: the zero word, the 2(|F|-1) words
/// using only one of the two traces (weight (p-1) p^(n-1) each), and for
/// every a in F* a block of |F|-1 words of weight
/// (p-1) p^(n-1) - (p-1)/p * W(a).  Errors on a degenerate exponent, where
/// the two trace families coincide.
pub fn cyclic_code_weights(ctx: &FieldCtx, d: u64) -> Result<BTreeMap<u64, u64>> {
    let n_mult = (ctx.order() - 1) as u64;
    if numth::gcd_u64(d % n_mult.max(1), n_mult) != 1 {
        return Err(Error::InvalidParameter(format!(
            "decimation {} shares a factor with the period {}",
            d, n_mult
        )));
    }
    if is_degenerate(ctx, d) {
        return Err(Error::InvalidParameter(format!(
            "exponent {} is a Frobenius power on {}; the code degenerates",
            d, ctx
        )));
    }
    let p = ctx.characteristic();
    let report = walsh_spectrum(ctx, d)?;
    let pn1 = (ctx.order() / p as u128) as u64; // p^(n-1)
    let base = (p - 1) * pn1;
    let mut weights: BTreeMap<u64, u64> = BTreeMap::new();
    weights.insert(0, 1);
    *weights.entry(base).or_insert(0) += 2 * n_mult;
    for line in &report.lines {
        if line.value.rem_euclid(p as i64) != 0 {
            return Err(Error::CheckFailed(format!(
                "sum value {} not divisible by the characteristic",
                line.value
            )));
        }
        let w = base as i64 - (p as i64 - 1) * (line.value / p as i64);
        debug_assert!(w >= 0);
        *weights.entry(w as u64).or_insert(0) += n_mult * line.count;
    }
    let total: u64 = weights.values().sum();
    if total as u128 != ctx.order() * ctx.order() {
        return Err(Error::CheckFailed(format!(
            "weight distribution covers {} words, expected {}",
            total,
            ctx.order() * ctx.order()
        )));
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, build_field_with_modulus};

    #[test]
    fn quartic_field_spectrum() {
        let f = build_field(2, 4).unwrap();
        let r = walsh_spectrum(&f, 13).unwrap();
        assert_eq!(r.zero_input_value, Some(0));
        assert_eq!(
            r.counts(),
            BTreeMap::from([(-4, 4), (0, 5), (4, 4), (8, 2)])
        );
        let c = crosscorrelation_spectrum(&f, 13).unwrap();
        assert_eq!(
            c.counts(),
            BTreeMap::from([(-5, 4), (-1, 5), (3, 4), (7, 2)])
        );
        assert_eq!(c.total_count(), 15);
        // Modulus independence: the other primitive quartic gives the same
        // multiset.
        let g = build_field_with_modulus(2, 4, &[1, 0, 0, 1, 1]).unwrap();
        assert_eq!(walsh_spectrum(&g, 13).unwrap().counts(), r.counts());
    }

    #[test]
    fn tiny_field_spectrum_and_degeneracy() {
        let f = build_field(2, 2).unwrap();
        // d = 5 reduces to the square map on GF(4): degenerate, two values.
        assert!(is_degenerate(&f, 5));
        assert!(is_degenerate(&f, 2));
        let r5 = walsh_spectrum(&f, 5).unwrap();
        let r2 = walsh_spectrum(&f, 2).unwrap();
        assert_eq!(r5.counts(), BTreeMap::from([(0, 2), (4, 1)]));
        assert_eq!(r5.counts(), r2.counts());
        // Degenerate exponents are rejected by the code construction.
        assert!(cyclic_code_weights(&f, 5).is_err());
        // Nondegenerate example.
        let g = build_field(2, 4).unwrap();
        assert!(!is_degenerate(&g, 13));
        assert_eq!(cyclotomic_class(&g, 13), vec![7, 11, 13, 14]);
    }

    #[test]
    fn parseval_totals() {
        for (n, d) in [(4u32, 13u64), (6, 29)] {
            let f = build_field(2, n).unwrap();
            let r = walsh_spectrum(&f, d).unwrap();
            let mut total: i128 = r.zero_input_value.unwrap() as i128;
            total = total * total;
            for l in &r.lines {
                total += (l.value as i128) * (l.value as i128) * l.count as i128;
            }
            assert_eq!(total, (f.order() * f.order()) as i128);
        }
    }

    #[test]
    fn odd_characteristic_rational_sum() {
        let f = build_field(3, 2).unwrap();
        let s = weil_sum(&f, 5, f.one()).unwrap();
        assert_eq!(s.fiber_counts(), &[5, 2, 2]);
        assert!(s.is_rational());
        assert_eq!(s.value(), Some(3));
    }

    #[test]
    fn exponent_family_values() {
        for (n, want_d) in [(2u32, 5u64), (4, 13), (6, 29), (8, 61), (10, 125), (12, 253)] {
            let f = build_field(2, n).unwrap();
            let e = niho_exponent(&f, 4).unwrap();
            assert_eq!(e.d, want_d);
            // gcd(7, 2^m + 1) = 1 always: 7 divides 2^(3k) - 1, never 2^m + 1.
            assert!(e.valid);
        }
        let f = build_field(2, 4).unwrap();
        // s = 3: gcd(5, 5) = 5, the validity condition fails.
        assert!(!niho_exponent(&f, 3).unwrap().valid);
        assert!(niho_exponent(&f, 0).is_err());
        let odd = build_field(2, 3).unwrap();
        assert!(niho_exponent(&odd, 4).is_err());
    }

    #[test]
    fn nonlinearity_values() {
        let f = build_field(2, 4).unwrap();
        assert_eq!(nonlinearity(&f, 13).unwrap(), 4);
        let g = build_field(2, 6).unwrap();
        assert_eq!(nonlinearity(&g, 29).unwrap(), 20);
    }

    #[test]
    fn code_weight_distributions() {
        let f = build_field(2, 4).unwrap();
        assert_eq!(
            cyclic_code_weights(&f, 13).unwrap(),
            BTreeMap::from([(0, 1), (4, 30), (6, 60), (8, 105), (10, 60)])
        );
        let g = build_field(2, 6).unwrap();
        assert_eq!(
            cyclic_code_weights(&g, 29).unwrap(),
            BTreeMap::from([(0, 1), (20, 126), (24, 252), (28, 756), (32, 1827), (36, 1134)])
        );
    }

    #[test]
    fn report_serialization_shape() {
        let f = build_field(2, 4).unwrap();
        let r = walsh_spectrum(&f, 13).unwrap();
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["field"], "2^4");
        assert_eq!(json["d"], 13);
        assert_eq!(json["zero_input_value"], 0);
        assert_eq!(json["lines"].as_array().unwrap().len(), 4);
        assert_eq!(json["normalized"][0]["den"], 4);
        let csv = r.to_csv();
        assert!(csv.starts_with("value,count\n-4,4\n"));
        // Scaling: every value is a multiple of sqrt|F| = 4.
        assert_eq!(r.scaled_values(4).unwrap(), vec![-1, 0, 1, 2]);
    }
}
