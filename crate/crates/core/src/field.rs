//! Finite-field contexts and element arithmetic.
//!
//! A [`FieldCtx`] owns one concrete presentation of GF(p^n): the modulus
//! (constant-first coefficient vector over GF(p)), a certified primitive
//! element when one is available, and either discrete-log/antilog tables
//! (small fields) or polynomial-basis reduction (large binary fields, up to
//! GF(2^126) for splitting-field work).  Element values are the base-p digit
//! packing of their polynomial-basis coordinates, so a value is portable
//! between two contexts only through an explicit [`embed`].
//!
//! Elements are tagged with their context id; mixing elements from different
//! contexts panics rather than coercing.  Everything is exact integer
//! arithmetic — there is no floating point anywhere in this crate.

use crate::error::{Error, Result};
use crate::numth;
use crate::poly::{self, Poly};
use once_cell::sync::OnceCell;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

/// Fields at most this large get exp/log tables; larger binary fields fall
/// back to polynomial-basis reduction.
pub const DEFAULT_TABLE_CUTOFF_BITS: u32 = 22;

/// Largest absolute extension degree over GF(2) we ever represent (values are
/// 128-bit masks and multiplication needs one bit of headroom).
pub const MAX_ABSOLUTE_DEGREE: u32 = 126;

static NEXT_CTX_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_CTX_ID.fetch_add(1, Ordering::Relaxed)
}

/// An element of a specific field context.
///
/// Plain data: the owning context id plus the packed coordinate value.  All
/// arithmetic goes through the owning [`FieldCtx`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem {
    pub(crate) ctx: u64,
    pub(crate) val: u128,
}

impl FieldElem {
    /// Id of the owning context.
    pub fn ctx_id(&self) -> u64 {
        self.ctx
    }

    /// Packed coordinate value (base-p digits of the polynomial-basis
    /// coordinate vector; for p = 2 this is the plain bitmask).
    pub fn raw(&self) -> u128 {
        self.val
    }

    pub fn is_zero(&self) -> bool {
        self.val == 0
    }
}

#[derive(Clone)]
struct Tables {
    /// `exp[i]` = value of alpha^i, doubled so `exp[la + lb]` needs no modulo.
    exp: Vec<u32>,
    /// `log[v]` = discrete log of the value `v`; entry 0 is a sentinel.
    log: Vec<u32>,
}

/// Link from an extension context back to the field it was built over.
#[derive(Clone)]
pub(crate) struct ParentLink {
    pub(crate) parent: Arc<FieldCtx>,
    /// Images of the parent's polynomial-basis powers 1, beta, ..., beta^(pn-1).
    gamma_pows: Vec<u128>,
    /// Designated root of the defining polynomial, as a raw value here.
    pub(crate) root: u128,
    pub(crate) rel_degree: u32,
}

/// One concrete finite field GF(p^n) with a fixed modulus and representation.
///
/// Immutable after construction and safe to share across threads.
#[derive(Clone)]
pub struct FieldCtx {
    id: u64,
    p: u64,
    n: u32,
    order: u128,
    /// Modulus as constant-first digits over GF(p), length n + 1, monic.
    modulus: Vec<u64>,
    /// p = 2 only: the modulus as a bitmask including the x^n bit.
    mod_mask: u128,
    alpha: Option<u128>,
    tables: Option<Tables>,
    parent: Option<ParentLink>,
    trace_tbl: OnceCell<Vec<u8>>,
    to_parent: OnceCell<Vec<u128>>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldCtx({}, id {})", self.descriptor(), self.id)
    }
}

impl std::fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FieldCtx {
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Characteristic p.
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Absolute extension degree n over the prime field.
    pub fn degree(&self) -> u32 {
        self.n
    }

    /// |F| = p^n.
    pub fn order(&self) -> u128 {
        self.order
    }

    /// Human-readable "p^n" descriptor used in reports.
    pub fn descriptor(&self) -> String {
        format!("{}^{}", self.p, self.n)
    }

    /// The modulus as constant-first digits over GF(p).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Whether this context is backed by discrete-log tables (as opposed to
    /// polynomial-basis reduction).
    pub fn is_table_backed(&self) -> bool {
        self.tables.is_some()
    }

    /// The certified primitive element, when one was established.
    pub fn alpha(&self) -> Result<FieldElem> {
        self.alpha
            .map(|v| self.el(v))
            .ok_or_else(|| Error::UnsupportedField(format!("{} has no certified primitive element", self)))
    }

    /// The parent context when this one was created by [`build_extension`].
    pub fn parent(&self) -> Option<&Arc<FieldCtx>> {
        self.parent.as_ref().map(|l| &l.parent)
    }

    /// Designated root of the defining polynomial, for extension contexts.
    pub fn designated_root(&self) -> Option<FieldElem> {
        self.parent.as_ref().map(|l| self.el(l.root))
    }

    /// Extension degree over the parent, for extension contexts.
    pub fn relative_degree(&self) -> Option<u32> {
        self.parent.as_ref().map(|l| l.rel_degree)
    }

    pub fn zero(&self) -> FieldElem {
        self.el(0)
    }

    pub fn one(&self) -> FieldElem {
        self.el(1)
    }

    pub(crate) fn el(&self, val: u128) -> FieldElem {
        debug_assert!(val < self.order);
        FieldElem { ctx: self.id, val }
    }

    /// Wrap a packed value as an element, validating the range.
    pub fn elem_from_raw(&self, val: u128) -> Result<FieldElem> {
        if val < self.order {
            Ok(self.el(val))
        } else {
            Err(Error::InvalidParameter(format!(
                "value {} out of range for {}",
                val, self
            )))
        }
    }

    /// Build an element from constant-first digits over GF(p).
    pub fn elem_from_coeffs(&self, digits: &[u64]) -> Result<FieldElem> {
        if digits.len() > self.n as usize {
            return Err(Error::InvalidParameter(format!(
                "{} digits exceed degree {}",
                digits.len(),
                self.n
            )));
        }
        let mut val: u128 = 0;
        for &d in digits.iter().rev() {
            if d >= self.p {
                return Err(Error::InvalidParameter(format!(
                    "digit {} not below characteristic {}",
                    d, self.p
                )));
            }
            val = val * self.p as u128 + d as u128;
        }
        Ok(self.el(val))
    }

    /// Constant-first digit vector of an element.
    pub fn coeffs(&self, x: FieldElem) -> Vec<u64> {
        self.assert_own(x);
        let mut v = x.val;
        let mut out = Vec::with_capacity(self.n as usize);
        for _ in 0..self.n {
            out.push((v % self.p as u128) as u64);
            v /= self.p as u128;
        }
        out
    }

    /// Check that an element belongs to this context.
    pub fn ensure(&self, x: FieldElem) -> Result<()> {
        if x.ctx == self.id {
            Ok(())
        } else {
            Err(Error::ForeignElement {
                expected: format!("{} (id {})", self, self.id),
                got: format!("id {}", x.ctx),
            })
        }
    }

    #[track_caller]
    fn assert_own(&self, x: FieldElem) {
        assert!(
            x.ctx == self.id,
            "element from context id {} used in {} (id {}); embed explicitly",
            x.ctx,
            self,
            self.id
        );
    }

    /// Iterate over every element of the field.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.order).map(move |v| self.el(v))
    }

    /// Iterate over every nonzero element.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (1..self.order).map(move |v| self.el(v))
    }

    /// Uniformly random element.
    pub fn random_elem<R: rand::Rng>(&self, rng: &mut R) -> FieldElem {
        self.el(rng.gen_range(0..self.order))
    }

    // ---- raw arithmetic on packed values ---------------------------------

    pub(crate) fn radd(&self, a: u128, b: u128) -> u128 {
        if self.p == 2 {
            a ^ b
        } else {
            let (p, mut a, mut b) = (self.p as u128, a, b);
            let mut out: u128 = 0;
            let mut place: u128 = 1;
            for _ in 0..self.n {
                out += place * ((a % p + b % p) % p);
                a /= p;
                b /= p;
                place *= p;
            }
            out
        }
    }

    pub(crate) fn rneg(&self, a: u128) -> u128 {
        if self.p == 2 {
            a
        } else {
            let (p, mut a) = (self.p as u128, a);
            let mut out: u128 = 0;
            let mut place: u128 = 1;
            for _ in 0..self.n {
                out += place * ((p - a % p) % p);
                a /= p;
                place *= p;
            }
            out
        }
    }

    pub(crate) fn rsub(&self, a: u128, b: u128) -> u128 {
        if self.p == 2 {
            a ^ b
        } else {
            self.radd(a, self.rneg(b))
        }
    }

    pub(crate) fn rmul(&self, a: u128, b: u128) -> u128 {
        if a == 0 || b == 0 {
            return 0;
        }
        if let Some(t) = &self.tables {
            let la = t.log[a as usize] as usize;
            let lb = t.log[b as usize] as usize;
            t.exp[la + lb] as u128
        } else {
            gf2x::mulmod(a, b, self.mod_mask, self.n)
        }
    }

    pub(crate) fn rsq(&self, a: u128) -> u128 {
        self.rmul(a, a)
    }

    pub(crate) fn rinv(&self, a: u128) -> Result<u128> {
        if a == 0 {
            return Err(Error::NotInvertible);
        }
        if let Some(t) = &self.tables {
            let nm = (self.order - 1) as usize;
            Ok(t.exp[nm - t.log[a as usize] as usize] as u128)
        } else {
            // Fermat: a^(2^n - 2).
            Ok(self.rpow(a, self.order - 2))
        }
    }

    pub(crate) fn rpow(&self, a: u128, e: u128) -> u128 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.tables {
            let nm = self.order - 1;
            let idx = (t.log[a as usize] as u128 * (e % nm)) % nm;
            t.exp[idx as usize] as u128
        } else {
            let mut base = a;
            let mut e = e;
            let mut acc: u128 = 1;
            while e != 0 {
                if e & 1 == 1 {
                    acc = self.rmul(acc, base);
                }
                base = self.rmul(base, base);
                e >>= 1;
            }
            acc
        }
    }

    // ---- public element arithmetic ---------------------------------------

    pub fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.assert_own(x);
        self.assert_own(y);
        self.el(self.radd(x.val, y.val))
    }

    pub fn sub(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.assert_own(x);
        self.assert_own(y);
        self.el(self.rsub(x.val, y.val))
    }

    pub fn neg(&self, x: FieldElem) -> FieldElem {
        self.assert_own(x);
        self.el(self.rneg(x.val))
    }

    pub fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.assert_own(x);
        self.assert_own(y);
        self.el(self.rmul(x.val, y.val))
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem> {
        self.assert_own(x);
        Ok(self.el(self.rinv(x.val)?))
    }

    pub fn div(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem> {
        self.assert_own(x);
        self.assert_own(y);
        Ok(self.el(self.rmul(x.val, self.rinv(y.val)?)))
    }

    /// x^e with e = 0 giving 1 (also for x = 0).
    pub fn pow(&self, x: FieldElem, e: u128) -> FieldElem {
        self.assert_own(x);
        self.el(self.rpow(x.val, e))
    }

    /// The Frobenius map x -> x^p.
    pub fn frobenius(&self, x: FieldElem) -> FieldElem {
        self.pow(x, self.p as u128)
    }

    /// Square root in characteristic 2 (squaring is bijective there).
    pub fn sqrt(&self, x: FieldElem) -> Result<FieldElem> {
        if self.p != 2 {
            return Err(Error::OddCharacteristic(self.p));
        }
        self.assert_own(x);
        let mut v = x.val;
        for _ in 0..self.n.saturating_sub(1) {
            v = self.rsq(v);
        }
        debug_assert_eq!(self.rsq(v), x.val);
        Ok(self.el(v))
    }

    /// Absolute trace down to the prime field, returned as a residue mod p.
    pub fn absolute_trace(&self, x: FieldElem) -> Result<u64> {
        self.ensure(x)?;
        Ok(self.rtrace(x.val))
    }

    pub(crate) fn rtrace(&self, v: u128) -> u64 {
        if let Some(tbl) = self.trace_tbl.get() {
            return tbl[v as usize] as u64;
        }
        if self.p == 2 {
            let mut acc: u128 = 0;
            let mut y = v;
            for _ in 0..self.n {
                acc ^= y;
                y = self.rsq(y);
            }
            debug_assert_eq!(y, v);
            debug_assert!(acc <= 1);
            acc as u64
        } else {
            let mut acc: u128 = 0;
            let mut y = v;
            for _ in 0..self.n {
                acc = self.radd(acc, y);
                y = self.rpow(y, self.p as u128);
            }
            debug_assert_eq!(y, v);
            debug_assert!(acc < self.p as u128);
            acc as u64
        }
    }

    /// Per-element absolute-trace table (table-backed binary contexts only).
    pub(crate) fn trace_table(&self) -> Result<&[u8]> {
        if self.p != 2 {
            return Err(Error::OddCharacteristic(self.p));
        }
        if self.tables.is_none() {
            return Err(Error::UnsupportedField(format!(
                "{} is not table-backed",
                self
            )));
        }
        Ok(self.trace_tbl.get_or_init(|| {
            let mut tbl = vec![0u8; self.order as usize];
            for v in 1..self.order {
                let mut acc: u128 = 0;
                let mut y = v;
                for _ in 0..self.n {
                    acc ^= y;
                    y = self.rsq(y);
                }
                tbl[v as usize] = acc as u8;
            }
            tbl
        }))
    }

    /// Relative trace onto the subfield of absolute degree `sub_degree`:
    /// the sum of x^(p^sub_degree)^k over k < n / sub_degree.
    pub fn relative_trace(&self, x: FieldElem, sub_degree: u32) -> Result<FieldElem> {
        self.ensure(x)?;
        if sub_degree == 0 || self.n % sub_degree != 0 {
            return Err(Error::InvalidParameter(format!(
                "subfield degree {} does not divide {}",
                sub_degree, self.n
            )));
        }
        let q0 = numth::checked_pow_u128(self.p, sub_degree).expect("subfield order fits");
        let m = self.n / sub_degree;
        let mut acc: u128 = 0;
        let mut y = x.val;
        for _ in 0..m {
            acc = self.radd(acc, y);
            y = self.rpow(y, q0);
        }
        debug_assert_eq!(y, x.val);
        // The result lies in the subfield: fixed by x -> x^(p^sub_degree).
        debug_assert_eq!(self.rpow(acc, q0), acc);
        Ok(self.el(acc))
    }

    /// |H_F| = p^(n/2), the order of the half field.  Requires n even.
    pub fn half_order(&self) -> Result<u128> {
        if self.n % 2 != 0 {
            return Err(Error::OddDegree(self.descriptor()));
        }
        Ok(numth::checked_pow_u128(self.p, self.n / 2).expect("half order fits"))
    }

    /// Conjugation over the half field, x -> x^|H_F|, within this context.
    pub fn tau(&self, x: FieldElem) -> Result<FieldElem> {
        self.ensure(x)?;
        Ok(self.pow(x, self.half_order()?))
    }

    /// Whether `base` is this context or an ancestor of it.
    pub fn extends(&self, base: &FieldCtx) -> bool {
        let mut cur = self;
        loop {
            if cur.id == base.id {
                return true;
            }
            match &cur.parent {
                Some(l) => cur = &l.parent,
                None => return false,
            }
        }
    }

    fn apply_parent_embedding(&self, link: &ParentLink, parent_val: u128) -> u128 {
        // Characteristic-2 towers only: the parent value is a bitmask of
        // polynomial-basis coordinates, so the image is a subset-XOR.
        let mut out: u128 = 0;
        let mut v = parent_val;
        let mut i = 0usize;
        while v != 0 {
            if v & 1 == 1 {
                out ^= link.gamma_pows[i];
            }
            v >>= 1;
            i += 1;
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Cross-context maps
// ---------------------------------------------------------------------------

/// Embed an element of `src` into `dst`, which must have been built (possibly
/// in several steps) as an extension of `src`.
pub fn embed(src: &Arc<FieldCtx>, dst: &Arc<FieldCtx>, x: FieldElem) -> Result<FieldElem> {
    src.ensure(x)?;
    if src.id == dst.id {
        return Ok(x);
    }
    // Collect the chain of extension steps from dst down to src.
    let mut steps: Vec<Arc<FieldCtx>> = Vec::new();
    let mut cur = dst.clone();
    loop {
        let link = match &cur.parent {
            Some(l) => l,
            None => {
                return Err(Error::NoEmbedding {
                    src: src.descriptor(),
                    dst: dst.descriptor(),
                })
            }
        };
        let parent = link.parent.clone();
        steps.push(cur.clone());
        if parent.id == src.id {
            break;
        }
        cur = parent;
    }
    let mut val = x.val;
    for ctx in steps.iter().rev() {
        let link = ctx.parent.as_ref().expect("chain step has a parent");
        val = ctx.apply_parent_embedding(link, val);
    }
    Ok(dst.el(val))
}

/// Conjugation of `base` applied inside `host`: x -> x^|H_base|.
///
/// `host` must be `base` itself or an extension of it; the map is well defined
/// on the whole algebraic closure.
pub fn tau_in(base: &FieldCtx, host: &FieldCtx, x: FieldElem) -> Result<FieldElem> {
    host.ensure(x)?;
    if !host.extends(base) {
        return Err(Error::NoEmbedding {
            src: base.descriptor(),
            dst: host.descriptor(),
        });
    }
    Ok(host.pow(x, base.half_order()?))
}

/// Conjugate-reciprocal map of `base` inside `host`: x -> x^(-|H_base|).
pub fn pi_in(base: &FieldCtx, host: &FieldCtx, x: FieldElem) -> Result<FieldElem> {
    host.ensure(x)?;
    if !host.extends(base) {
        return Err(Error::NoEmbedding {
            src: base.descriptor(),
            dst: host.descriptor(),
        });
    }
    let inv = host.inv(x)?;
    Ok(host.pow(inv, base.half_order()?))
}

/// Whether `x` (living in `host`) lies on the unit circle of `base`, i.e.
/// satisfies x * tau_base(x) = 1.  The (|H_base|+1)-th roots of unity in any
/// extension of `base` are exactly the unit circle of `base`.
pub fn on_unit_circle(base: &FieldCtx, host: &FieldCtx, x: FieldElem) -> Result<bool> {
    host.ensure(x)?;
    if !host.extends(base) {
        return Err(Error::NoEmbedding {
            src: base.descriptor(),
            dst: host.descriptor(),
        });
    }
    let q = base.half_order()?;
    Ok(host.rpow(x.val, q + 1) == 1)
}

/// The unit circle of `ctx` as an ordered list: powers of the canonical
/// generator alpha^(|H_F| - 1), which has order |H_F| + 1.
pub fn unit_circle(ctx: &FieldCtx) -> Result<Vec<FieldElem>> {
    let q = ctx.half_order()?;
    let alpha = ctx.alpha()?;
    let g = ctx.pow(alpha, q - 1);
    let mut out = Vec::with_capacity((q + 1) as usize);
    let mut cur = ctx.one();
    for _ in 0..=q {
        out.push(cur);
        cur = ctx.mul(cur, g);
    }
    // Closure check: the generator really has order |H_F| + 1.
    if cur != ctx.one() {
        return Err(Error::CheckFailed(format!(
            "unit-circle generator of {} does not close after {} steps",
            ctx,
            q + 1
        )));
    }
    Ok(out)
}

/// Degree of the subfield extension `base(x)` over `base`, for `x` in `host`.
pub fn element_degree(base: &FieldCtx, host: &FieldCtx, x: FieldElem) -> Result<u32> {
    host.ensure(x)?;
    if !host.extends(base) {
        return Err(Error::NoEmbedding {
            src: base.descriptor(),
            dst: host.descriptor(),
        });
    }
    let rel = host.degree() / base.degree();
    let mut y = x.val;
    for k in 1..=rel {
        y = host.rpow(y, base.order());
        if y == x.val {
            debug_assert_eq!(rel % k, 0);
            return Ok(k);
        }
    }
    Err(Error::CheckFailed(format!(
        "Frobenius orbit of element did not close within degree {}",
        rel
    )))
}

/// Express an element of an extension context as a coefficient vector over
/// its parent, in the basis 1, r, ..., r^(e-1) given by the designated root.
pub fn express_over_parent(host: &Arc<FieldCtx>, x: FieldElem) -> Result<Vec<FieldElem>> {
    host.ensure(x)?;
    let link = host.parent.as_ref().ok_or_else(|| {
        Error::InvalidParameter(format!("{} was not built as an extension", host))
    })?;
    let m = host.degree() as usize;
    let pn = link.parent.degree() as usize;
    let e = link.rel_degree as usize;
    let inv = host.to_parent.get_or_try_init(|| -> Result<Vec<u128>> {
        // Columns of the basis matrix: embed(beta^i) * r^j.
        let mut cols: Vec<u128> = Vec::with_capacity(m);
        let mut rj: u128 = 1;
        for _j in 0..e {
            for i in 0..pn {
                cols.push(host.rmul(link.gamma_pows[i], rj));
            }
            rj = host.rmul(rj, link.root);
        }
        invert_gf2_matrix(&cols, m).ok_or_else(|| {
            Error::CheckFailed("extension basis matrix is singular".into())
        })
    })?;
    let mut out = Vec::with_capacity(e);
    for j in 0..e {
        let mut coeff: u128 = 0;
        for i in 0..pn {
            let row = inv[j * pn + i];
            if (row & x.val).count_ones() & 1 == 1 {
                coeff |= 1 << i;
            }
        }
        out.push(link.parent.el(coeff));
    }
    Ok(out)
}

/// Invert an m-by-m matrix over GF(2) given as column bitmasks; returns
/// row-major rows of the inverse, or None if singular.
fn invert_gf2_matrix(cols: &[u128], m: usize) -> Option<Vec<u128>> {
    // rows[r] holds row r of the matrix as a bitmask over columns, augmented
    // with row r of the identity in the high part.
    let mut rows: Vec<(u128, u128)> = (0..m)
        .map(|r| {
            let mut bits: u128 = 0;
            for (c, col) in cols.iter().enumerate() {
                if (col >> r) & 1 == 1 {
                    bits |= 1 << c;
                }
            }
            (bits, 1u128 << r)
        })
        .collect();
    for c in 0..m {
        let pivot = (c..m).find(|&r| (rows[r].0 >> c) & 1 == 1)?;
        rows.swap(c, pivot);
        let (pb, pa) = rows[c];
        for r in 0..m {
            if r != c && (rows[r].0 >> c) & 1 == 1 {
                rows[r].0 ^= pb;
                rows[r].1 ^= pa;
            }
        }
    }
    // After elimination rows[c].0 is the unit vector e_c, and rows[c].1 holds
    // row c of the inverse.
    Some(rows.into_iter().map(|(_, a)| a).collect())
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

/// Build GF(p^n) with the default modulus (lexicographically smallest
/// primitive polynomial) and default table cutoff.
pub fn build_field(p: u64, n: u32) -> Result<Arc<FieldCtx>> {
    build_field_opts(p, n, None, DEFAULT_TABLE_CUTOFF_BITS)
}

/// Build GF(p^n) over an explicit monic irreducible modulus (constant-first).
pub fn build_field_with_modulus(p: u64, n: u32, modulus: &[u64]) -> Result<Arc<FieldCtx>> {
    build_field_opts(p, n, Some(modulus), DEFAULT_TABLE_CUTOFF_BITS)
}

/// Full-control construction: optional explicit modulus and a table cutoff in
/// bits (fields of order at most 2^cutoff get exp/log tables).
pub fn build_field_opts(
    p: u64,
    n: u32,
    modulus: Option<&[u64]>,
    table_cutoff_bits: u32,
) -> Result<Arc<FieldCtx>> {
    let ctx = make_ctx(p, n, modulus, table_cutoff_bits, true)?;
    Ok(Arc::new(ctx))
}

fn make_ctx(
    p: u64,
    n: u32,
    modulus: Option<&[u64]>,
    table_cutoff_bits: u32,
    base_field_limits: bool,
) -> Result<FieldCtx> {
    if !numth::is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::UnsupportedField("degree must be positive".into()));
    }
    if p == 2 {
        let cap = if base_field_limits { 64 } else { MAX_ABSOLUTE_DEGREE };
        if n > cap {
            return Err(Error::UnsupportedField(format!(
                "degree {} exceeds the {} cap for GF(2^n)",
                n, cap
            )));
        }
    }
    let order = numth::checked_pow_u128(p, n)
        .filter(|&o| p == 2 || o <= 1 << DEFAULT_TABLE_CUTOFF_BITS)
        .ok_or_else(|| {
            Error::UnsupportedField(format!(
                "odd characteristic is supported only up to 2^{} elements",
                DEFAULT_TABLE_CUTOFF_BITS
            ))
        })?;

    // Resolve the modulus.
    let modulus: Vec<u64> = match modulus {
        Some(m) => {
            validate_modulus(p, n, m)?;
            m.to_vec()
        }
        None => default_modulus(p, n)?,
    };
    let mod_mask: u128 = if p == 2 {
        modulus
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &c)| acc | ((c as u128) << i))
    } else {
        0
    };

    // Locate a primitive element.  The x-class is primitive exactly when the
    // modulus is a primitive polynomial (the default always is); otherwise
    // scan for a generator.  Skipped for huge binary fields where the group
    // order cannot be factored in u64.
    let alpha = if order - 1 <= u64::MAX as u128 {
        let group = (order - 1) as u64;
        let factors = numth::prime_factors_u64(group);
        let is_gen = |v: u128| -> bool {
            if v == 0 {
                return false;
            }
            factors
                .iter()
                .all(|&q| raw_pow(p, n, &modulus, mod_mask, v, (group / q) as u128) != 1)
        };
        let x_class = x_class_value(p, n, &modulus, mod_mask);
        if group == 1 || is_gen(x_class) {
            Some(x_class)
        } else {
            (2..order).find(|&v| is_gen(v))
        }
    } else {
        None
    };

    let tables = if order <= 1u128 << table_cutoff_bits || p != 2 {
        let a = alpha.ok_or_else(|| {
            Error::UnsupportedField(format!("no generator found for {}^{}", p, n))
        })?;
        Some(build_tables(p, n, &modulus, mod_mask, order, a))
    } else {
        None
    };

    Ok(FieldCtx {
        id: fresh_id(),
        p,
        n,
        order,
        modulus,
        mod_mask,
        alpha,
        tables,
        parent: None,
        trace_tbl: OnceCell::new(),
        to_parent: OnceCell::new(),
    })
}

/// Multiply in GF(p)[x]/modulus on packed values, without a context.
fn raw_mul(p: u64, n: u32, modulus: &[u64], mod_mask: u128, a: u128, b: u128) -> u128 {
    if p == 2 {
        gf2x::mulmod(a, b, mod_mask, n)
    } else {
        let pa = gfpx::unpack(a, p, n);
        let pb = gfpx::unpack(b, p, n);
        gfpx::pack(&gfpx::mulmod(&pa, &pb, modulus, p), p)
    }
}

fn raw_pow(p: u64, n: u32, modulus: &[u64], mod_mask: u128, mut base: u128, mut e: u128) -> u128 {
    let mut acc: u128 = 1;
    while e != 0 {
        if e & 1 == 1 {
            acc = raw_mul(p, n, modulus, mod_mask, acc, base);
        }
        base = raw_mul(p, n, modulus, mod_mask, base, base);
        e >>= 1;
    }
    acc
}

/// Packed value of the residue class of x.
fn x_class_value(p: u64, n: u32, modulus: &[u64], mod_mask: u128) -> u128 {
    if n > 1 {
        return p as u128;
    }
    // Degree 1: x = -c0 mod (x + c0).
    if p == 2 {
        mod_mask & 1
    } else {
        (p - modulus[0] % p) as u128 % p as u128
    }
}

fn build_tables(p: u64, n: u32, modulus: &[u64], mod_mask: u128, order: u128, alpha: u128) -> Tables {
    let nm = (order - 1) as usize;
    let mut exp = Vec::with_capacity(2 * nm);
    let mut log = vec![u32::MAX; order as usize];
    let mut cur: u128 = 1;
    for i in 0..nm {
        exp.push(cur as u32);
        log[cur as usize] = i as u32;
        cur = raw_mul(p, n, modulus, mod_mask, cur, alpha);
    }
    assert_eq!(cur, 1, "generator order mismatch while building tables");
    exp.extend_from_within(0..nm);
    Tables { exp, log }
}

fn validate_modulus(p: u64, n: u32, m: &[u64]) -> Result<()> {
    if m.len() != n as usize + 1 {
        return Err(Error::BadModulus(format!(
            "expected {} coefficients, got {}",
            n + 1,
            m.len()
        )));
    }
    if m.iter().any(|&c| c >= p) {
        return Err(Error::BadModulus(format!(
            "coefficients must be reduced mod {}",
            p
        )));
    }
    if m[n as usize] != 1 {
        return Err(Error::BadModulus("modulus must be monic".into()));
    }
    let irreducible = if p == 2 {
        let mask = m
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &c)| acc | ((c as u128) << i));
        gf2x::is_irreducible(mask, n)
    } else {
        gfpx::is_irreducible(m, p)
    };
    if !irreducible {
        return Err(Error::BadModulus(format!(
            "polynomial is reducible over GF({})",
            p
        )));
    }
    Ok(())
}

/// The default modulus: smallest primitive polynomial of degree n over GF(p),
/// ordered by the integer encoding sum(c_i * p^i).  Cached per (p, n).
fn default_modulus(p: u64, n: u32) -> Result<Vec<u64>> {
    static CACHE: OnceCell<Mutex<HashMap<(u64, u32), Vec<u64>>>> = OnceCell::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(m) = cache.lock().unwrap().get(&(p, n)) {
        return Ok(m.clone());
    }
    let m = if p == 2 {
        if n <= 63 {
            let mask = gf2x::smallest_primitive(n).ok_or_else(|| {
                Error::UnsupportedField(format!("no primitive polynomial of degree {}", n))
            })?;
            (0..=n).map(|i| ((mask >> i) & 1) as u64).collect()
        } else {
            // Beyond u64 group orders we cannot certify primitivity; use the
            // smallest irreducible polynomial instead (extension hosts only).
            let mask = gf2x::smallest_irreducible(n);
            (0..=n).map(|i| ((mask >> i) & 1) as u64).collect()
        }
    } else {
        gfpx::smallest_primitive(p, n).ok_or_else(|| {
            Error::UnsupportedField(format!("no primitive polynomial of degree {} over GF({})", n, p))
        })?
    };
    cache.lock().unwrap().insert((p, n), m.clone());
    Ok(m)
}

/// Build the extension of `ctx` defined by an irreducible polynomial `f` of
/// degree at least 2.  The result is a fresh absolute context for
/// GF(2^(n*deg f)) carrying an embedding of `ctx` and a designated root of
/// `f`; its defining data are deterministic given (`ctx`, `f`).
pub fn build_extension(ctx: &Arc<FieldCtx>, f: &Poly) -> Result<Arc<FieldCtx>> {
    if ctx.p != 2 {
        return Err(Error::OddCharacteristic(ctx.p));
    }
    if f.ctx_id() != ctx.id {
        return Err(Error::ForeignElement {
            expected: ctx.descriptor(),
            got: "polynomial over another context".into(),
        });
    }
    let e = f.degree().ok_or(Error::ZeroPolynomial)? as u32;
    if e < 2 {
        return Err(Error::InvalidParameter(
            "extension degree must be at least 2".into(),
        ));
    }
    if !poly::is_irreducible(f)? {
        return Err(Error::BadModulus(
            "extension polynomial is reducible".into(),
        ));
    }
    let m = ctx
        .n
        .checked_mul(e)
        .filter(|&m| m <= MAX_ABSOLUTE_DEGREE)
        .ok_or_else(|| {
            Error::UnsupportedField(format!(
                "absolute degree {} * {} exceeds {}",
                ctx.n, e, MAX_ABSOLUTE_DEGREE
            ))
        })?;

    let host0 = Arc::new(make_ctx(2, m, None, DEFAULT_TABLE_CUTOFF_BITS, false)?);

    // Deterministic seed for the root searches, derived from the inputs.
    let mut seed: u64 = 0x9e37_79b9_7f4a_7c15u64
        .wrapping_mul(ctx.order as u64 ^ (ctx.n as u64) << 32)
        .wrapping_add(m as u64);
    for i in 0..=e as usize {
        let c = f.coeff_raw(i);
        seed = seed
            .rotate_left(13)
            .wrapping_mul(0x100_0000_01b3)
            .wrapping_add(c as u64 ^ (c >> 64) as u64);
    }

    // Embed ctx: gamma is a root in host0 of ctx's modulus (a GF(2) polynomial).
    let mod_in_host: Vec<u128> = ctx.modulus.iter().map(|&c| c as u128).collect();
    let mod_poly = Poly::from_raw(host0.clone(), mod_in_host);
    let gamma = poly::find_any_root(&host0, &mod_poly, seed)?;
    let mut gamma_pows = Vec::with_capacity(ctx.n as usize);
    let mut g: u128 = 1;
    for _ in 0..ctx.n {
        gamma_pows.push(g);
        g = host0.rmul(g, gamma.val);
    }
    // gamma generates a copy of ctx: gamma^(p^n) = gamma.
    debug_assert_eq!(host0.rpow(gamma.val, ctx.order), gamma.val);

    // Designated root of f, with f's coefficients pushed through the embedding.
    let f_coeffs: Vec<u128> = (0..=e as usize)
        .map(|i| {
            let mut out: u128 = 0;
            let mut v = f.coeff_raw(i);
            let mut bit = 0usize;
            while v != 0 {
                if v & 1 == 1 {
                    out ^= gamma_pows[bit];
                }
                v >>= 1;
                bit += 1;
            }
            out
        })
        .collect();
    let f_host = Poly::from_raw(host0.clone(), f_coeffs);
    let root = poly::find_any_root(&host0, &f_host, seed ^ 0x5bf0_3635)?;
    debug_assert!(f_host.eval(root).is_zero());

    let mut inner = Arc::try_unwrap(host0).unwrap_or_else(|arc| (*arc).clone());
    inner.id = fresh_id();
    inner.parent = Some(ParentLink {
        parent: ctx.clone(),
        gamma_pows,
        root: root.val,
        rel_degree: e,
    });
    inner.to_parent = OnceCell::new();
    Ok(Arc::new(inner))
}

// ---------------------------------------------------------------------------
// GF(2)[x] on bitmasks
// ---------------------------------------------------------------------------

pub(crate) mod gf2x {
    use crate::numth;

    /// Multiply a*b mod f, where f has degree n (bit n set) and a, b are
    /// reduced.  Shift-and-xor with reduction on the fly; needs n <= 126.
    pub fn mulmod(mut a: u128, mut b: u128, f: u128, n: u32) -> u128 {
        let top: u128 = 1 << n;
        let mut acc: u128 = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= f;
            }
        }
        acc
    }

    pub fn powmod(mut base: u128, mut e: u128, f: u128, n: u32) -> u128 {
        let mut acc: u128 = 1;
        while e != 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, base, f, n);
            }
            base = mulmod(base, base, f, n);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(mut a: u128, mut b: u128) -> u128 {
        while b != 0 {
            while a != 0 && 128 - a.leading_zeros() >= 128 - b.leading_zeros() {
                a ^= b << ((128 - a.leading_zeros()) - (128 - b.leading_zeros()));
            }
            std::mem::swap(&mut a, &mut b);
        }
        a
    }

    /// Rabin irreducibility test for a degree-n polynomial over GF(2).
    pub fn is_irreducible(f: u128, n: u32) -> bool {
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        if f & 1 == 0 {
            return false; // divisible by x
        }
        // Walk x^(2^k) mod f, checking the subfield conditions on the way.
        let subs: Vec<u32> = numth::prime_factors_u64(n as u64)
            .iter()
            .map(|&q| n / q as u32)
            .collect();
        let mut y: u128 = 2; // x
        for k in 1..=n {
            y = mulmod(y, y, f, n);
            if subs.contains(&k) && gcd(y ^ 2, f) != 1 {
                return false;
            }
        }
        y == 2
    }

    /// Smallest irreducible polynomial of degree n, by integer encoding.
    pub fn smallest_irreducible(n: u32) -> u128 {
        let base: u128 = 1 << n;
        let mut f = base + 1;
        loop {
            if is_irreducible(f, n) {
                return f;
            }
            f += 2;
        }
    }

    /// Smallest primitive polynomial of degree n <= 63, by integer encoding.
    pub fn smallest_primitive(n: u32) -> Option<u128> {
        let group: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let factors = numth::prime_factors_u64(group);
        let base: u128 = 1 << n;
        let mut f = base + 1;
        while f < base << 1 {
            if is_irreducible(f, n)
                && factors
                    .iter()
                    .all(|&q| powmod(2, (group / q) as u128, f, n) != 1)
            {
                return Some(f);
            }
            f += 2;
        }
        None
    }
}

// ---------------------------------------------------------------------------
// GF(p)[x] on digit vectors (odd characteristic, construction-time only)
// ---------------------------------------------------------------------------

mod gfpx {
    use crate::numth;

    pub fn unpack(mut v: u128, p: u64, n: u32) -> Vec<u64> {
        let mut out = Vec::with_capacity(n as usize);
        for _ in 0..n {
            out.push((v % p as u128) as u64);
            v /= p as u128;
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    pub fn pack(digits: &[u64], p: u64) -> u128 {
        digits
            .iter()
            .rev()
            .fold(0u128, |acc, &d| acc * p as u128 + d as u128)
    }

    fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    /// Schoolbook product reduced by the monic `modulus` (constant-first).
    pub fn mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
        let n = modulus.len() - 1;
        for i in (n..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for k in 0..n {
                let sub = (c * modulus[k]) % p;
                prod[i - n + k] = (prod[i - n + k] + p * p - sub) % p;
            }
        }
        prod.truncate(n);
        trim(&mut prod);
        prod
    }

    pub fn powmod(base: &[u64], mut e: u128, modulus: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = base.to_vec();
        while e != 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, modulus, p);
            }
            b = mulmod(&b, &b, modulus, p);
            e >>= 1;
        }
        acc
    }

    fn polymod(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let da = r.len() - 1;
            let c = (r[da] * lead_inv) % p;
            for k in 0..=dm {
                let sub = (c * m[k]) % p;
                r[da - dm + k] = (r[da - dm + k] + p - sub) % p;
            }
            trim(&mut r);
            if r.is_empty() {
                break;
            }
        }
        r
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = polymod(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        // p is a small prime; Fermat inverse.
        let mut acc = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e != 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    }

    /// Rabin test over GF(p) for a monic `f` given constant-first.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = (f.len() - 1) as u32;
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        let mut y = x.clone();
        let subs: Vec<u32> = numth::prime_factors_u64(n as u64)
            .iter()
            .map(|&q| n / q as u32)
            .collect();
        for k in 1..=n {
            y = powmod(&y, p as u128, f, p);
            if subs.contains(&k) {
                let mut diff = y.clone();
                while diff.len() < 2 {
                    diff.push(0);
                }
                diff[1] = (diff[1] + p - 1) % p;
                trim(&mut diff);
                let g = gcd(&diff, f, p);
                if g.len() != 1 {
                    return false;
                }
            }
        }
        y == x
    }

    /// Smallest primitive polynomial of degree n over GF(p) by integer
    /// encoding of the coefficient vector.
    pub fn smallest_primitive(p: u64, n: u32) -> Option<Vec<u64>> {
        let group = numth::checked_pow_u128(p, n)? as u64 - 1;
        let factors = numth::prime_factors_u64(group);
        let count = numth::checked_pow_u128(p, n)?;
        for enc in 0..count {
            let mut f = unpack(enc, p, n);
            f.resize(n as usize, 0);
            f.push(1);
            if !is_irreducible(&f, p) {
                continue;
            }
            let x = vec![0u64, 1];
            let primitive = factors
                .iter()
                .all(|&q| powmod(&x, (group / q) as u128, &f, p) != vec![1]);
            if primitive {
                return Some(f);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_basics() {
        let f = build_field(2, 2).unwrap();
        assert_eq!(f.order(), 4);
        assert_eq!(f.modulus(), &[1, 1, 1]); // x^2 + x + 1
        let a = f.alpha().unwrap();
        // alpha has multiplicative order 3.
        assert_ne!(f.pow(a, 1), f.one());
        assert_eq!(f.pow(a, 3), f.one());
        // Tr(1) = 1 + 1 = 0, Tr(alpha) = alpha + alpha^2 = 1.
        assert_eq!(f.absolute_trace(f.one()).unwrap(), 0);
        assert_eq!(f.absolute_trace(a).unwrap(), 1);
    }

    #[test]
    fn default_moduli_match_reference_tables() {
        // Smallest primitive polynomials, by integer encoding.
        assert_eq!(gf2x::smallest_primitive(2), Some(0b111));
        assert_eq!(gf2x::smallest_primitive(3), Some(0b1011));
        assert_eq!(gf2x::smallest_primitive(4), Some(0b10011));
        assert_eq!(gf2x::smallest_primitive(5), Some(0b100101));
        assert_eq!(gf2x::smallest_primitive(6), Some(0b1000011));
        assert_eq!(gf2x::smallest_primitive(8), Some(0b100011101));
        assert_eq!(gf2x::smallest_primitive(10), Some(0b10000001001));
        assert_eq!(gf2x::smallest_primitive(12), Some(0b1000001010011));
        assert_eq!(gf2x::smallest_primitive(16), Some(0b10000000000101101));
    }

    #[test]
    fn gf9_basics() {
        let f = build_field(3, 2).unwrap();
        assert_eq!(f.order(), 9);
        assert_eq!(f.modulus(), &[2, 1, 1]); // x^2 + x + 2
        let a = f.alpha().unwrap();
        assert_eq!(f.pow(a, 8), f.one());
        assert_ne!(f.pow(a, 4), f.one());
        // Tr(alpha) = alpha + alpha^3 = 2 (direct expansion under x^2 = 2x + 1).
        assert_eq!(f.absolute_trace(a).unwrap(), 2);
        // Additive structure: (1 + 2) = 0 digit-wise.
        let two = f.elem_from_coeffs(&[2]).unwrap();
        assert_eq!(f.add(f.one(), two), f.zero());
    }

    #[test]
    fn custom_modulus_and_rejection() {
        // x^4 + x^3 + 1 is the other primitive quartic.
        let f = build_field_with_modulus(2, 4, &[1, 0, 0, 1, 1]).unwrap();
        let a = f.alpha().unwrap();
        assert_eq!(f.pow(a, 15), f.one());
        assert_ne!(f.pow(a, 5), f.one());
        assert_ne!(f.pow(a, 3), f.one());
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 is reducible.
        assert!(matches!(
            build_field_with_modulus(2, 4, &[1, 0, 1, 0, 1]),
            Err(Error::BadModulus(_))
        ));
        // Non-monic rejected.
        assert!(build_field_with_modulus(3, 1, &[1, 2]).is_err());
    }

    #[test]
    fn foreign_elements_are_rejected() {
        let f = build_field(2, 4).unwrap();
        let g = build_field(2, 4).unwrap(); // same parameters, distinct context
        let x = f.alpha().unwrap();
        assert!(g.ensure(x).is_err());
        assert!(g.absolute_trace(x).is_err());
    }

    #[test]
    #[should_panic(expected = "embed explicitly")]
    fn foreign_arithmetic_panics() {
        let f = build_field(2, 4).unwrap();
        let g = build_field(2, 4).unwrap();
        let _ = f.add(f.one(), g.one());
    }

    #[test]
    fn unit_circle_sizes_and_membership() {
        let f = build_field(2, 4).unwrap();
        let u = unit_circle(&f).unwrap();
        assert_eq!(u.len(), 5); // sqrt(16) + 1
        for &x in &u {
            // x * tau(x) = 1 is the defining equation.
            let t = f.tau(x).unwrap();
            assert_eq!(f.mul(x, t), f.one());
            assert!(on_unit_circle(&f, &f, x).unwrap());
        }
        // GF(4): the unit circle is all of F* (q + 1 = 3 = |F*|).
        let g = build_field(2, 2).unwrap();
        assert_eq!(unit_circle(&g).unwrap().len(), 3);
        // tau is an involution.
        for x in f.elements() {
            assert_eq!(f.tau(f.tau(x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn relative_trace_lands_in_subfield() {
        let f = build_field(2, 4).unwrap();
        for x in f.elements() {
            let t = f.relative_trace(x, 2).unwrap();
            // Fixed by y -> y^4.
            assert_eq!(f.pow(t, 4), t);
        }
        assert!(f.relative_trace(f.one(), 3).is_err());
    }

    #[test]
    fn representation_cutoff_equivalence() {
        use rand::{Rng, SeedableRng};
        let a = build_field_opts(2, 10, None, DEFAULT_TABLE_CUTOFF_BITS).unwrap();
        let b = build_field_opts(2, 10, None, 5).unwrap();
        assert!(a.is_table_backed());
        assert!(!b.is_table_backed());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let (x, y, z) = (
                rng.gen_range(0..1024u128),
                rng.gen_range(0..1024u128),
                rng.gen_range(0..1024u128),
            );
            // (x + y) * z and x^e agree between the two representations.
            assert_eq!(
                a.rmul(a.radd(x, y), z),
                b.rmul(b.radd(x, y), z)
            );
            let e = rng.gen_range(0..4_000_000u128);
            assert_eq!(a.rpow(x, e), b.rpow(x, e));
            if x != 0 {
                assert_eq!(a.rinv(x).unwrap(), b.rinv(x).unwrap());
            }
        }
    }

    #[test]
    fn extension_root_and_embedding() {
        use crate::poly::Poly;
        let f = build_field(2, 4).unwrap();
        // x^2 + x + alpha is irreducible over GF(16) (alpha has odd trace
        // pattern); find an irreducible quadratic by scanning constants.
        let mut ext = None;
        for c in f.nonzero_elements() {
            let p = Poly::from_elems(&f, &[c, f.one(), f.one()]).unwrap();
            if crate::poly::is_irreducible(&p).unwrap() {
                ext = Some(p);
                break;
            }
        }
        let p = ext.expect("some monic quadratic is irreducible");
        let e = build_extension(&f, &p).unwrap();
        assert_eq!(e.order(), 256);
        assert_eq!(e.relative_degree(), Some(2));
        let r = e.designated_root().unwrap();
        // r satisfies p and its Frobenius conjugate is the other root.
        let p_up: Vec<FieldElem> = (0..=2)
            .map(|i| embed(&f, &e, p.coeff(i)).unwrap())
            .collect();
        let eval = |x: FieldElem| {
            let mut acc = e.zero();
            for c in p_up.iter().rev() {
                acc = e.add(e.mul(acc, x), *c);
            }
            acc
        };
        assert!(eval(r).is_zero());
        let conj = e.pow(r, f.order());
        assert_ne!(conj, r);
        assert!(eval(conj).is_zero());

        // Embedding is a ring homomorphism and respects traces.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x = f.random_elem(&mut rng);
            let y = f.random_elem(&mut rng);
            let ex = embed(&f, &e, x).unwrap();
            let ey = embed(&f, &e, y).unwrap();
            assert_eq!(embed(&f, &e, f.add(x, y)).unwrap(), e.add(ex, ey));
            assert_eq!(embed(&f, &e, f.mul(x, y)).unwrap(), e.mul(ex, ey));
            // Tr_E(embed(x)) = [E:F] * Tr_F(x) mod 2 = 0 here.
            assert_eq!(e.absolute_trace(ex).unwrap(), 0);
        }
        assert_eq!(embed(&f, &e, f.zero()).unwrap(), e.zero());
        assert_eq!(embed(&f, &e, f.one()).unwrap(), e.one());

        // Unit circles of F and E meet only in 1 (even-degree extension).
        let q_f = f.half_order().unwrap();
        let q_e = e.half_order().unwrap();
        let mut both = 0;
        for v in e.nonzero_elements() {
            if e.rpow(v.raw(), q_f + 1) == 1 && e.rpow(v.raw(), q_e + 1) == 1 {
                both += 1;
            }
        }
        assert_eq!(both, 1);

        // express_over_parent inverts the basis expansion.
        for _ in 0..50 {
            let z = e.random_elem(&mut rng);
            let coeffs = express_over_parent(&e, z).unwrap();
            assert_eq!(coeffs.len(), 2);
            let mut acc = e.zero();
            let mut rpow = e.one();
            for c in &coeffs {
                let cu = embed(&f, &e, *c).unwrap();
                acc = e.add(acc, e.mul(cu, rpow));
                rpow = e.mul(rpow, r);
            }
            assert_eq!(acc, z);
        }
    }

    #[test]
    fn pi_composes_to_frobenius_square() {
        use crate::poly::Poly;
        let f = build_field(2, 4).unwrap();
        let mut ext = None;
        for c in f.nonzero_elements() {
            let p = Poly::from_elems(&f, &[c, f.one(), f.one()]).unwrap();
            if crate::poly::is_irreducible(&p).unwrap() {
                ext = Some(p);
                break;
            }
        }
        let e = build_extension(&f, &ext.unwrap()).unwrap();
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let qf = f.half_order().unwrap();
        let qe = e.half_order().unwrap();
        for _ in 0..50 {
            let x = e.random_elem(&mut rng);
            if x.is_zero() {
                continue;
            }
            // pi_F(pi_F(x)) = tau_F(tau_F(x)) = x^(|H_F|^2).
            let pp = pi_in(&f, &e, pi_in(&f, &e, x).unwrap()).unwrap();
            let tt = tau_in(&f, &e, tau_in(&f, &e, x).unwrap()).unwrap();
            assert_eq!(pp, tt);
            assert_eq!(pp, e.pow(x, qf * qf));
            // Mixing circles: pi_E(pi_F(x)) = x^(|H_F| * |H_E|).
            let m = pi_in(&e, &e, pi_in(&f, &e, x).unwrap()).unwrap();
            assert_eq!(m, e.pow(x, qf * qe));
        }
    }

    #[test]
    fn element_degree_divides_relative_degree() {
        use crate::poly::Poly;
        let f = build_field(2, 2).unwrap();
        let mut ext = None;
        for c0 in f.nonzero_elements() {
            for c1 in f.elements() {
                let p = Poly::from_elems(&f, &[c0, c1, f.zero(), f.one()]).unwrap();
                if crate::poly::is_irreducible(&p).unwrap() {
                    ext = Some(p);
                    break;
                }
            }
            if ext.is_some() {
                break;
            }
        }
        let e = build_extension(&f, &ext.unwrap()).unwrap();
        assert_eq!(e.order(), 64);
        let mut seen = std::collections::BTreeSet::new();
        for x in e.nonzero_elements() {
            let d = element_degree(&f, &e, x).unwrap();
            assert!(d == 1 || d == 3);
            seen.insert(d);
        }
        assert_eq!(seen.len(), 2);
    }
}
