//! Maximum-length sequences, decimation, and direct crosscorrelation,
//! closing the loop between three descriptions of the same data: bit-level
//! correlations of sequence pairs, the exponential-sum spectrum, and the
//! weight distribution of the associated cyclic code.
//!
//! Everything here is exact integer arithmetic on packed bit vectors.  The
//! direct correlation path is quadratic in the period and deliberately
//! capped at small fields; the point is not speed but independence - its
//! numbers come from counting bit agreements, with no character sums
//! anywhere in sight, and must reproduce the spectrum module's output
//! exactly.

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::numth;
use crate::spectra::{self, SpectrumLine};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Largest field order the quadratic direct-correlation path accepts.
pub const DIRECT_CAP: u128 = 1 << 13;

/// A binary sequence of odd period, stored as packed 64-bit words.
#[derive(Clone, Debug)]
pub struct BinarySequence {
    period: u64,
    words: Vec<u64>,
    /// Human-readable provenance: which field and construction produced it.
    generator: String,
}

/// Equality is bit-for-bit; where the sequence came from does not matter.
impl PartialEq for BinarySequence {
    fn eq(&self, other: &Self) -> bool {
        self.period == other.period && self.words == other.words
    }
}

impl Eq for BinarySequence {}

impl BinarySequence {
    fn from_bits(period: u64, bits: impl Iterator<Item = bool>, generator: String) -> Self {
        let mut words = vec![0u64; (period as usize + 63) / 64];
        let mut count = 0u64;
        for (t, bit) in bits.enumerate() {
            if bit {
                words[t / 64] |= 1u64 << (t % 64);
            }
            count += 1;
        }
        assert_eq!(count, period, "bit iterator length disagrees with the period");
        BinarySequence { period, words, generator }
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn generator(&self) -> &str {
        &self.generator
    }

    /// The bit s_t, indices taken modulo the period.
    pub fn bit(&self, t: u64) -> bool {
        let i = (t % self.period) as usize;
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Number of ones in one period.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// The sequence shifted left by `shift`: result bit t is s_{t+shift}.
    pub fn cyclic_shift(&self, shift: u64) -> BinarySequence {
        let n = self.period;
        let s = shift % n;
        Self::from_bits(
            n,
            (0..n).map(|t| self.bit(t + s)),
            format!("{} <<{}", self.generator, s),
        )
    }

    /// Bitwise sum of two sequences of equal period.
    pub fn xor(&self, other: &BinarySequence) -> Result<BinarySequence> {
        if self.period != other.period {
            return Err(Error::InvalidParameter(format!(
                "period mismatch: {} vs {}",
                self.period, other.period
            )));
        }
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Ok(BinarySequence {
            period: self.period,
            words,
            generator: format!("({}) + ({})", self.generator, other.generator),
        })
    }

    /// The bits as an ASCII string of '0'/'1', index 0 first.
    pub fn to_bit_string(&self) -> String {
        (0..self.period).map(|t| if self.bit(t) { '1' } else { '0' }).collect()
    }

    /// The bits packed four per hex digit, earlier indices in the high bit
    /// of each digit; the final digit is zero-padded.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity((self.period as usize + 3) / 4);
        let mut t = 0u64;
        while t < self.period {
            let mut nib = 0u8;
            for k in 0..4 {
                nib <<= 1;
                if t + k < self.period && self.bit(t + k) {
                    nib |= 1;
                }
            }
            out.push(char::from_digit(nib as u32, 16).unwrap());
            t += 4;
        }
        out
    }

    /// Verify the two properties that make this a maximum-length sequence:
    /// balanced weight (2^(n-1) ones among 2^n - 1 bits) and no period
    /// smaller than the full one.
    fn check_m_sequence(&self) -> Result<()> {
        if self.weight() != (self.period + 1) / 2 {
            return Err(Error::CheckFailed(format!(
                "sequence weight {} is not balanced for period {}",
                self.weight(),
                self.period
            )));
        }
        for q in numth::prime_factors_u64(self.period) {
            if self.cyclic_shift(self.period / q).words == self.words {
                return Err(Error::CheckFailed(format!(
                    "sequence repeats with period dividing {}",
                    self.period / q
                )));
            }
        }
        Ok(())
    }
}

/// The maximum-length sequence s_t = Tr(alpha^t) of the field's primitive
/// element, of period |F| - 1.  Balance and exact period are verified.
pub fn m_sequence(ctx: &Arc<FieldCtx>) -> Result<BinarySequence> {
    if ctx.characteristic() != 2 {
        return Err(Error::OddCharacteristic(ctx.characteristic()));
    }
    if ctx.order() > 1 << 22 {
        return Err(Error::UnsupportedField(
            "sequence generation is capped at order 2^22".into(),
        ));
    }
    ctx.trace_table()?;
    let alpha = ctx.alpha()?;
    let n = (ctx.order() - 1) as u64;
    let mut x = ctx.one();
    let seq = BinarySequence::from_bits(
        n,
        (0..n).map(|_| {
            let bit = ctx.rtrace(x.raw()) == 1;
            x = ctx.mul(x, alpha);
            bit
        }),
        format!("Tr(alpha^t) over {}", ctx.descriptor()),
    );
    seq.check_m_sequence()?;
    Ok(seq)
}

/// The decimation u_t = s_{d t mod N}.  Requires gcd(d, N) = 1, which makes
/// the result a maximum-length sequence again; that is re-verified rather
/// than trusted.
pub fn decimate(seq: &BinarySequence, d: u64) -> Result<BinarySequence> {
    let n = seq.period();
    if numth::gcd_u64(d % n, n) != 1 {
        return Err(Error::InvalidParameter(format!(
            "decimation {} shares a factor with the period {}",
            d, n
        )));
    }
    let out = BinarySequence::from_bits(
        n,
        (0..n).map(|t| seq.bit(t.wrapping_mul(d) % n)),
        format!("{} decimated by {}", seq.generator(), d),
    );
    out.check_m_sequence()?;
    Ok(out)
}

/// The correlation sum over one period: agreements minus disagreements of
/// u_{t+shift} against v_t.
pub fn crosscorrelation_direct(
    u: &BinarySequence,
    v: &BinarySequence,
    shift: u64,
) -> Result<i64> {
    let diff = u.cyclic_shift(shift).xor(v)?;
    Ok(u.period() as i64 - 2 * diff.weight() as i64)
}

/// Correlation values at every shift 0..N-1.
pub fn full_crosscorrelation(u: &BinarySequence, v: &BinarySequence) -> Result<Vec<i64>> {
    if u.period() != v.period() {
        return Err(Error::InvalidParameter(format!(
            "period mismatch: {} vs {}",
            u.period(),
            v.period()
        )));
    }
    (0..u.period())
        .into_par_iter()
        .map(|shift| crosscorrelation_direct(u, v, shift))
        .collect()
}

/// Outcome of playing the bit-counting route against the character-sum
/// route for one decimation.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub field: String,
    pub d: u64,
    pub period: u64,
    /// Correlation value -> number of shifts, from direct bit counting.
    pub correlation_lines: Vec<SpectrumLine>,
    /// The same multiset claimed by the exponential-sum path.
    pub spectrum_lines: Vec<SpectrumLine>,
    /// Whether the code-weight comparison ran; skipped only for degenerate
    /// decimations, where the weight formula declines to answer.
    pub weights_checked: bool,
    /// Weight -> word count re-derived from the correlations, when checked.
    pub derived_weights: Option<Vec<SpectrumLine>>,
}

/// Compare the direct correlation multiset of (decimated, original) against
/// {W(a) - 1 : a in F*}, and re-derive the cyclic-code weight distribution
/// from the correlations.
///
/// Every word of the two-generator cyclic code is either zero, one of the 2N
/// single-generator words (balanced, weight (N+1)/2), or a mixed word whose
/// weight is (N - C(shift))/2 for one of the N relative shifts, each shift
/// accounting for N words.  The derived distribution must equal the one the
/// weight formula produces from the spectrum.
pub fn spectrum_equivalence_check(ctx: &Arc<FieldCtx>, d: u64) -> Result<EquivalenceReport> {
    if ctx.order() > DIRECT_CAP {
        return Err(Error::UnsupportedField(format!(
            "direct correlation is capped at order {}",
            DIRECT_CAP
        )));
    }
    let seq = m_sequence(ctx)?;
    let dec = decimate(&seq, d)?;
    let corr = full_crosscorrelation(&dec, &seq)?;
    let mut corr_counts: BTreeMap<i64, u64> = BTreeMap::new();
    for c in &corr {
        *corr_counts.entry(*c).or_insert(0) += 1;
    }

    let spectrum = spectra::crosscorrelation_spectrum(ctx, d)?;
    let spec_counts = spectrum.counts();
    if corr_counts != spec_counts {
        return Err(Error::CheckFailed(format!(
            "correlation multiset {:?} differs from the spectrum multiset {:?}",
            corr_counts, spec_counts
        )));
    }

    let n = seq.period();
    let degenerate = spectra::is_degenerate(ctx, d);
    let derived_weights = if degenerate {
        None
    } else {
        let mut weights: BTreeMap<u64, u64> = BTreeMap::new();
        weights.insert(0, 1);
        *weights.entry((n + 1) / 2).or_insert(0) += 2 * n;
        for c in &corr {
            let w = (n as i64 - c) / 2;
            *weights.entry(w as u64).or_insert(0) += n;
        }
        let from_formula = spectra::cyclic_code_weights(ctx, d)?;
        if weights != from_formula {
            return Err(Error::CheckFailed(format!(
                "derived weights {:?} differ from the formula's {:?}",
                weights, from_formula
            )));
        }
        Some(weights)
    };

    let to_lines = |m: &BTreeMap<i64, u64>| {
        m.iter().map(|(&value, &count)| SpectrumLine { value, count }).collect::<Vec<_>>()
    };
    Ok(EquivalenceReport {
        field: ctx.descriptor(),
        d,
        period: n,
        correlation_lines: to_lines(&corr_counts),
        spectrum_lines: to_lines(&spec_counts),
        weights_checked: !degenerate,
        derived_weights: derived_weights.map(|w| {
            w.iter().map(|(&value, &count)| SpectrumLine { value: value as i64, count }).collect()
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_sequences_are_balanced_with_ideal_autocorrelation() {
        let f4 = build_field(2, 2).unwrap();
        let s = m_sequence(&f4).unwrap();
        assert_eq!(s.period(), 3);
        assert_eq!(s.weight(), 2);

        let f8 = build_field(2, 3).unwrap();
        let s8 = m_sequence(&f8).unwrap();
        assert_eq!(s8.period(), 7);
        assert_eq!(s8.weight(), 4);
        assert_eq!(crosscorrelation_direct(&s8, &s8, 0).unwrap(), 7);
        for shift in 1..7 {
            assert_eq!(crosscorrelation_direct(&s8, &s8, shift).unwrap(), -1);
        }
    }

    #[test]
    fn decimation_identities() {
        let ctx = build_field(2, 4).unwrap();
        let s = m_sequence(&ctx).unwrap();
        assert_eq!(decimate(&s, 1).unwrap().to_bit_string(), s.to_bit_string());
        // Decimation by the characteristic is a cyclic shift of the
        // original sequence.
        let by2 = decimate(&s, 2).unwrap();
        assert!((0..15).any(|t| s.cyclic_shift(t) == by2));
        // d and 2d give shift-equivalent decimations.
        let d7 = decimate(&s, 7).unwrap();
        let d14 = decimate(&s, 14).unwrap();
        assert!((0..15).any(|t| d7.cyclic_shift(t) == d14));
        // Sharing a factor with the period is refused.
        assert!(decimate(&s, 3).is_err());
        assert!(decimate(&s, 5).is_err());
    }

    #[test]
    fn shift_and_add_closure() {
        let ctx = build_field(2, 5).unwrap();
        let s = m_sequence(&ctx).unwrap();
        let n = s.period();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let t1 = rng.gen_range(0..n);
            let t2 = rng.gen_range(0..n);
            if t1 == t2 {
                continue;
            }
            let sum = s.cyclic_shift(t1).xor(&s.cyclic_shift(t2)).unwrap();
            assert!(
                (0..n).any(|t3| sum.words == s.cyclic_shift(t3).words),
                "shift-and-add left the shift family"
            );
        }
    }

    #[test]
    fn quartic_field_equivalence_and_weights() {
        let ctx = build_field(2, 4).unwrap();
        let report = spectrum_equivalence_check(&ctx, 13).unwrap();
        assert!(report.weights_checked);
        let corr: BTreeMap<i64, u64> =
            report.correlation_lines.iter().map(|l| (l.value, l.count)).collect();
        assert_eq!(corr, BTreeMap::from([(-5, 4), (-1, 5), (3, 4), (7, 2)]));
        let weights: BTreeMap<i64, u64> = report
            .derived_weights
            .as_ref()
            .unwrap()
            .iter()
            .map(|l| (l.value, l.count))
            .collect();
        assert_eq!(
            weights,
            BTreeMap::from([(0, 1), (4, 30), (6, 60), (8, 105), (10, 60)])
        );

        // The s = 2 analogue on the same field.
        let r7 = spectrum_equivalence_check(&ctx, 7).unwrap();
        assert!(r7.weights_checked);

        // A degenerate decimation still matches the spectrum but skips the
        // weight formula.
        let r2 = spectrum_equivalence_check(&ctx, 2).unwrap();
        assert!(!r2.weights_checked);
        assert!(r2.derived_weights.is_none());
        let corr2: BTreeMap<i64, u64> =
            r2.correlation_lines.iter().map(|l| (l.value, l.count)).collect();
        assert_eq!(corr2, BTreeMap::from([(-1, 14), (15, 1)]));
    }

    #[test]
    fn sextic_field_equivalence() {
        let ctx = build_field(2, 6).unwrap();
        let report = spectrum_equivalence_check(&ctx, 29).unwrap();
        let weights: BTreeMap<i64, u64> = report
            .derived_weights
            .as_ref()
            .unwrap()
            .iter()
            .map(|l| (l.value, l.count))
            .collect();
        assert_eq!(
            weights,
            BTreeMap::from([(0, 1), (20, 126), (24, 252), (28, 756), (32, 1827), (36, 1134)])
        );
    }

    #[test]
    fn renderings_round_trip() {
        let ctx = build_field(2, 3).unwrap();
        let s = m_sequence(&ctx).unwrap();
        let bits = s.to_bit_string();
        assert_eq!(bits.len(), 7);
        assert_eq!(bits.chars().filter(|&c| c == '1').count(), 4);
        let hex = s.to_hex();
        assert_eq!(hex.len(), 2);
        // Re-expand the hex digits and compare against the bit string.
        let mut expanded = String::new();
        for c in hex.chars() {
            let v = c.to_digit(16).unwrap();
            for k in (0..4).rev() {
                expanded.push(if (v >> k) & 1 == 1 { '1' } else { '0' });
            }
        }
        assert_eq!(&expanded[..7], bits.as_str());
    }
}
