//! Sparse multivariate polynomial algebra over F2 and the elementary
//! symmetric-function machinery behind the root-pair-sum analysis.
//!
//! The headline object is the pair-sum numerator in `n` variables: the sum
//! over unordered pairs {i, j} of x_i x_j times the squared product of all
//! other pairwise differences.  Clearing denominators in the rational pair
//! sum S = sum x_i x_j / (x_i - x_j)^2 against the common denominator (the
//! squared difference product) yields exactly this polynomial, so its
//! vanishing at a root tuple decides whether S vanishes there.
//!
//! The numerator for seven variables is decomposed into elementary symmetric
//! polynomials by two independent routes - leading-term elimination and a
//! linear solve over F2 from random evaluations - and both are compared
//! against a 218-row table shipped with the crate.  Any disagreement between
//! the routes or with the table surfaces as an error rather than being
//! papered over.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use once_cell::sync::Lazy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::sync::Arc;

/// Largest variable count accepted by the combinatorial constructors.  The
/// subset enumeration in [`sigma`] walks 2^n masks, so this is a cost guard,
/// not a representational limit.
const MAX_VARS: usize = 16;

/// A multivariate polynomial over F2 in a fixed number of variables, stored
/// as the set of monomials with coefficient 1.
///
/// Exponent vectors are kept in lexicographic order with the first variable
/// most significant, which is the order the decomposition routine reads
/// leading terms in.  Per-variable exponents are bounded by u8; the products
/// built in this crate stay far below that.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly2 {
    n_vars: usize,
    terms: BTreeSet<Vec<u8>>,
}

impl MultiPoly2 {
    /// The zero polynomial in `n_vars` variables.
    pub fn zero(n_vars: usize) -> Self {
        MultiPoly2 { n_vars, terms: BTreeSet::new() }
    }

    /// The constant 1.
    pub fn one(n_vars: usize) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(vec![0; n_vars]);
        MultiPoly2 { n_vars, terms }
    }

    /// The single variable x_i (zero-based index).
    pub fn var(n_vars: usize, i: usize) -> Self {
        assert!(i < n_vars, "variable index {} out of range for {} variables", i, n_vars);
        let mut e = vec![0; n_vars];
        e[i] = 1;
        let mut terms = BTreeSet::new();
        terms.insert(e);
        MultiPoly2 { n_vars, terms }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of monomials with nonzero coefficient.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterate the monomials in ascending lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = &[u8]> {
        self.terms.iter().map(|t| t.as_slice())
    }

    /// The lexicographically largest monomial, if any.
    pub fn leading_term(&self) -> Option<&[u8]> {
        self.terms.iter().next_back().map(|t| t.as_slice())
    }

    /// Total degree of the largest-degree monomial, or None for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.iter().map(|&e| e as u32).sum()).max()
    }

    /// Whether every monomial has total degree exactly `d`.
    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.iter().all(|t| t.iter().map(|&e| e as u32).sum::<u32>() == d)
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(
            self.n_vars, other.n_vars,
            "cannot combine polynomials in {} and {} variables",
            self.n_vars, other.n_vars
        );
    }

    /// Sum over F2: the symmetric difference of the monomial sets.
    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut terms = self.terms.clone();
        for t in &other.terms {
            if !terms.remove(t) {
                terms.insert(t.clone());
            }
        }
        MultiPoly2 { n_vars: self.n_vars, terms }
    }

    /// Product over F2.  Pairwise exponent sums are collected and cancelled
    /// in pairs, so the cost is |self| * |other| plus a sort.
    ///
    /// With at most eight variables and all exponents below 128, monomials
    /// ride in one u64 with a byte lane per variable, which keeps the large
    /// products in the seven-variable computation allocation-free.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.n_vars);
        }
        if self.n_vars <= 8 && packable(&self.terms) && packable(&other.terms) {
            return self.mul_packed(other);
        }
        let mut products: Vec<Vec<u8>> = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let sum: Vec<u8> = a
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| x.checked_add(y).expect("per-variable exponent exceeds u8"))
                    .collect();
                products.push(sum);
            }
        }
        products.sort_unstable();
        let mut terms = BTreeSet::new();
        let mut i = 0;
        while i < products.len() {
            let mut j = i + 1;
            while j < products.len() && products[j] == products[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                terms.insert(products[i].clone());
            }
            i = j;
        }
        MultiPoly2 { n_vars: self.n_vars, terms }
    }

    /// Packed-u64 product path: byte lanes cannot carry because both inputs
    /// keep every exponent below 128.
    fn mul_packed(&self, other: &Self) -> Self {
        let n = self.n_vars;
        let pack = |t: &Vec<u8>| -> u64 {
            t.iter().enumerate().fold(0u64, |acc, (i, &e)| acc | (e as u64) << (8 * i))
        };
        let a: Vec<u64> = self.terms.iter().map(pack).collect();
        let b: Vec<u64> = other.terms.iter().map(pack).collect();
        let mut products: Vec<u64> = Vec::with_capacity(a.len() * b.len());
        for &x in &a {
            for &y in &b {
                products.push(x + y);
            }
        }
        products.sort_unstable();
        let mut terms = BTreeSet::new();
        let mut i = 0;
        while i < products.len() {
            let mut j = i + 1;
            while j < products.len() && products[j] == products[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                let t: Vec<u8> = (0..n).map(|k| (products[i] >> (8 * k)) as u8).collect();
                terms.insert(t);
            }
            i = j;
        }
        MultiPoly2 { n_vars: n, terms }
    }

    /// Square.  Over F2 all cross terms cancel, so squaring just doubles
    /// every exponent and keeps the term count.
    pub fn square(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                t.iter()
                    .map(|&e| e.checked_mul(2).expect("per-variable exponent exceeds u8"))
                    .collect()
            })
            .collect();
        MultiPoly2 { n_vars: self.n_vars, terms }
    }

    /// Power by repeated squaring.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.n_vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Evaluate at a point of a characteristic-2 field.  The F2 coefficients
    /// only make sense there; odd characteristic is rejected.
    pub fn eval(&self, ctx: &FieldCtx, point: &[FieldElem]) -> Result<FieldElem> {
        if ctx.characteristic() != 2 {
            return Err(Error::OddCharacteristic(ctx.characteristic()));
        }
        if point.len() != self.n_vars {
            return Err(Error::InvalidParameter(format!(
                "evaluation point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.n_vars
            )));
        }
        for &v in point {
            ctx.ensure(v)?;
        }
        let tables = power_tables(ctx, point, &max_exponents(self.n_vars, self.terms.iter()));
        let mut acc = ctx.zero();
        for t in &self.terms {
            let mut prod = ctx.one();
            for (i, &e) in t.iter().enumerate() {
                if e > 0 {
                    prod = ctx.mul(prod, tables[i][e as usize]);
                }
            }
            acc = ctx.add(acc, prod);
        }
        Ok(acc)
    }

    /// Apply a permutation of the variables: variable i of the input becomes
    /// variable `perm[i]` of the output.
    fn permute(&self, perm: &[usize]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut out = vec![0u8; self.n_vars];
                for (i, &e) in t.iter().enumerate() {
                    out[perm[i]] = e;
                }
                out
            })
            .collect();
        MultiPoly2 { n_vars: self.n_vars, terms }
    }

    /// Invariance under all variable permutations, checked on a generating
    /// pair: the transposition of the first two variables and the full cycle.
    pub fn is_symmetric(&self) -> bool {
        let n = self.n_vars;
        if n < 2 {
            return true;
        }
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        if self.permute(&swap) != *self {
            return false;
        }
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        self.permute(&cycle) == *self
    }
}

/// Whether every exponent stays below 128, the precondition for carry-free
/// byte-lane packing.
fn packable(terms: &BTreeSet<Vec<u8>>) -> bool {
    terms.iter().all(|t| t.iter().all(|&e| e < 128))
}

/// Per-variable maximum exponents over a set of exponent vectors.
fn max_exponents<'a>(n_vars: usize, rows: impl Iterator<Item = &'a Vec<u8>>) -> Vec<u8> {
    let mut maxes = vec![0u8; n_vars];
    for row in rows {
        for (m, &e) in maxes.iter_mut().zip(row) {
            *m = (*m).max(e);
        }
    }
    maxes
}

/// Power tables `tables[i][e] = point[i]^e` up to the given per-variable cap.
fn power_tables(ctx: &FieldCtx, point: &[FieldElem], maxes: &[u8]) -> Vec<Vec<FieldElem>> {
    point
        .iter()
        .zip(maxes)
        .map(|(&v, &m)| {
            let mut tbl = Vec::with_capacity(m as usize + 1);
            tbl.push(ctx.one());
            for e in 1..=m as usize {
                let prev = tbl[e - 1];
                tbl.push(ctx.mul(prev, v));
            }
            tbl
        })
        .collect()
}

/// The elementary symmetric polynomial sigma_k in `n_vars` variables.
pub fn sigma(n_vars: usize, k: usize) -> Result<MultiPoly2> {
    if n_vars == 0 || n_vars > MAX_VARS {
        return Err(Error::InvalidParameter(format!(
            "variable count must be between 1 and {}, got {}",
            MAX_VARS, n_vars
        )));
    }
    if k == 0 {
        return Ok(MultiPoly2::one(n_vars));
    }
    if k > n_vars {
        return Ok(MultiPoly2::zero(n_vars));
    }
    let mut terms = BTreeSet::new();
    for mask in 0u32..(1u32 << n_vars) {
        if mask.count_ones() as usize == k {
            let e: Vec<u8> = (0..n_vars).map(|i| ((mask >> i) & 1) as u8).collect();
            terms.insert(e);
        }
    }
    Ok(MultiPoly2 { n_vars, terms })
}

/// Elementary symmetric values sigma_1..sigma_n of a tuple of field
/// elements, by the usual one-pass recurrence.  Works in any characteristic.
pub fn elementary_symmetric_values(ctx: &FieldCtx, vals: &[FieldElem]) -> Result<Vec<FieldElem>> {
    for &v in vals {
        ctx.ensure(v)?;
    }
    let n = vals.len();
    let mut es = vec![ctx.zero(); n + 1];
    es[0] = ctx.one();
    for (i, &v) in vals.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            let bump = ctx.mul(es[j - 1], v);
            es[j] = ctx.add(es[j], bump);
        }
    }
    Ok(es[1..].to_vec())
}

/// The ordered product of pairwise differences, earlier index minus later:
/// prod over i < j of (v_i - v_j).  Zero exactly when two entries coincide.
/// Downstream uses only its square, so the ordering convention never shows.
pub fn difference_product_value(ctx: &FieldCtx, vals: &[FieldElem]) -> Result<FieldElem> {
    for &v in vals {
        ctx.ensure(v)?;
    }
    let mut acc = ctx.one();
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            acc = ctx.mul(acc, ctx.sub(vals[i], vals[j]));
        }
    }
    Ok(acc)
}

/// The pair-sum numerator as an expanded polynomial: the sum over pairs
/// {i, j} of x_i x_j times the squared product of the differences of all
/// *other* pairs.
///
/// This is the rational pair sum S = sum x_i x_j / (x_i - x_j)^2 with
/// denominators cleared against the squared full difference product, using
/// the characteristic-2 identity (x - y)^2 = x^2 + y^2.  Homogeneous of
/// total degree n(n-1), symmetric.  The 21-pair instance on seven variables
/// is the one the root analysis consumes.
pub fn pair_sum_numerator(n_vars: usize) -> Result<MultiPoly2> {
    if n_vars < 2 || n_vars > MAX_VARS {
        return Err(Error::InvalidParameter(format!(
            "pair-sum numerator needs between 2 and {} variables, got {}",
            MAX_VARS, n_vars
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n_vars)
        .flat_map(|i| (i + 1..n_vars).map(move |j| (i, j)))
        .collect();
    let summands: Vec<MultiPoly2> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut prod = MultiPoly2::one(n_vars);
            for &(k, l) in &pairs {
                if (k, l) != (i, j) {
                    let diff = MultiPoly2::var(n_vars, k).add(&MultiPoly2::var(n_vars, l));
                    prod = prod.mul(&diff);
                }
            }
            let xij = MultiPoly2::var(n_vars, i).mul(&MultiPoly2::var(n_vars, j));
            prod.square().mul(&xij)
        })
        .collect();
    let zero = MultiPoly2::zero(n_vars);
    Ok(summands.into_iter().fold(zero, |acc, s| acc.add(&s)))
}

/// The pair-sum numerator evaluated directly at a point, without expanding
/// the polynomial.  This is the independent route used to cross-check both
/// the symbolic expansion and the table-driven evaluation.
pub fn pair_sum_numerator_at(ctx: &FieldCtx, vals: &[FieldElem]) -> Result<FieldElem> {
    if ctx.characteristic() != 2 {
        return Err(Error::OddCharacteristic(ctx.characteristic()));
    }
    if vals.len() < 2 {
        return Err(Error::InvalidParameter(
            "pair-sum numerator needs at least two coordinates".into(),
        ));
    }
    for &v in vals {
        ctx.ensure(v)?;
    }
    let n = vals.len();
    let mut acc = ctx.zero();
    for i in 0..n {
        for j in i + 1..n {
            let mut prod = ctx.mul(vals[i], vals[j]);
            for k in 0..n {
                for l in k + 1..n {
                    if (k, l) != (i, j) {
                        let d = ctx.sub(vals[k], vals[l]);
                        prod = ctx.mul(prod, ctx.mul(d, d));
                    }
                }
            }
            acc = ctx.add(acc, prod);
        }
    }
    Ok(acc)
}

/// An F2-combination of products of elementary symmetric polynomials:
/// the rows are exponent vectors (e_1, .., e_n), each standing for the term
/// sigma_1^{e_1} * .. * sigma_n^{e_n} with coefficient 1.
///
/// Rows are kept strictly ascending in lexicographic order, which makes the
/// CSV rendering canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElemExpansion {
    n_vars: usize,
    rows: Vec<Vec<u8>>,
}

impl ElemExpansion {
    /// Build from rows, sorting and validating distinctness.
    pub fn new(n_vars: usize, mut rows: Vec<Vec<u8>>) -> Result<Self> {
        for row in &rows {
            if row.len() != n_vars {
                return Err(Error::InvalidParameter(format!(
                    "expansion row has {} entries, expected {}",
                    row.len(),
                    n_vars
                )));
            }
        }
        rows.sort_unstable();
        if rows.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate expansion row".into()));
        }
        Ok(ElemExpansion { n_vars, rows })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Number of terms in the combination.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The exponent rows in ascending lexicographic order.
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// The weighted degree sum k * e_k of one row: the total degree of the
    /// sigma-product it stands for, since sigma_k has degree k.
    pub fn weighted_degree(row: &[u8]) -> u32 {
        row.iter().enumerate().map(|(i, &e)| (i as u32 + 1) * e as u32).sum()
    }

    /// Whether every row has the same weighted degree `w`.
    pub fn is_weighted_homogeneous(&self, w: u32) -> bool {
        self.rows.iter().all(|r| Self::weighted_degree(r) == w)
    }

    /// Evaluate the combination at given values of sigma_1..sigma_n.
    pub fn evaluate(&self, ctx: &FieldCtx, sigma_values: &[FieldElem]) -> Result<FieldElem> {
        if ctx.characteristic() != 2 {
            return Err(Error::OddCharacteristic(ctx.characteristic()));
        }
        if sigma_values.len() != self.n_vars {
            return Err(Error::InvalidParameter(format!(
                "expected {} sigma values, got {}",
                self.n_vars,
                sigma_values.len()
            )));
        }
        for &v in sigma_values {
            ctx.ensure(v)?;
        }
        let tables = power_tables(ctx, sigma_values, &max_exponents(self.n_vars, self.rows.iter()));
        let mut acc = ctx.zero();
        for row in &self.rows {
            let mut prod = ctx.one();
            for (i, &e) in row.iter().enumerate() {
                if e > 0 {
                    prod = ctx.mul(prod, tables[i][e as usize]);
                }
            }
            acc = ctx.add(acc, prod);
        }
        Ok(acc)
    }

    /// Expand back into the monomial basis by multiplying out every
    /// sigma-product and summing over F2.
    pub fn expand(&self) -> Result<MultiPoly2> {
        let n = self.n_vars;
        let sigmas: Vec<MultiPoly2> = (1..=n).map(|k| sigma(n, k)).collect::<Result<_>>()?;
        let parts: Vec<MultiPoly2> = self
            .rows
            .par_iter()
            .map(|row| {
                let mut prod = MultiPoly2::one(n);
                for (k, &e) in row.iter().enumerate() {
                    if e > 0 {
                        prod = prod.mul(&sigmas[k].pow(e as u32));
                    }
                }
                prod
            })
            .collect();
        Ok(parts.into_iter().fold(MultiPoly2::zero(n), |acc, p| acc.add(&p)))
    }

    /// Render as CSV: header `term_no,e1,..,en`, then one 1-indexed row per
    /// term in ascending lexicographic order, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("term_no");
        for i in 1..=self.n_vars {
            out.push_str(&format!(",e{}", i));
        }
        out.push('\n');
        for (idx, row) in self.rows.iter().enumerate() {
            out.push_str(&format!("{}", idx + 1));
            for &e in row {
                out.push_str(&format!(",{}", e));
            }
            out.push('\n');
        }
        out
    }

    /// Parse the CSV produced by [`to_csv`], validating the header shape,
    /// the 1-based numbering, and strict lexicographic order.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty expansion CSV".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 2 || cols[0] != "term_no" {
            return Err(Error::InvalidParameter(format!("unexpected CSV header '{}'", header)));
        }
        let n_vars = cols.len() - 1;
        for (i, col) in cols[1..].iter().enumerate() {
            if *col != format!("e{}", i + 1) {
                return Err(Error::InvalidParameter(format!("unexpected CSV header '{}'", header)));
            }
        }
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != n_vars + 1 {
                return Err(Error::InvalidParameter(format!(
                    "CSV line {} has {} fields, expected {}",
                    lineno + 2,
                    fields.len(),
                    n_vars + 1
                )));
            }
            let term_no: usize = fields[0].parse().map_err(|_| {
                Error::InvalidParameter(format!("bad term number '{}' on line {}", fields[0], lineno + 2))
            })?;
            if term_no != lineno + 1 {
                return Err(Error::InvalidParameter(format!(
                    "term numbers out of sequence at line {}",
                    lineno + 2
                )));
            }
            let row: Vec<u8> = fields[1..]
                .iter()
                .map(|f| {
                    f.parse::<u8>().map_err(|_| {
                        Error::InvalidParameter(format!(
                            "bad exponent '{}' on line {}",
                            f,
                            lineno + 2
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            if let Some(prev) = rows.last() {
                if *prev >= row {
                    return Err(Error::InvalidParameter(format!(
                        "rows not strictly ascending at line {}",
                        lineno + 2
                    )));
                }
            }
            rows.push(row);
        }
        Ok(ElemExpansion { n_vars, rows })
    }
}

/// Decompose a symmetric polynomial into elementary symmetric polynomials by
/// leading-term elimination.
///
/// Each step reads the lexicographic leading monomial (whose exponents are
/// necessarily non-increasing for a symmetric polynomial), forms the unique
/// sigma-product with that leading monomial, and adds it away.  Over F2
/// every coefficient is 1, so no scalar bookkeeping is needed.  The loop
/// terminates with remainder zero, which is precisely the statement that the
/// collected sigma-products sum back to the input.
pub fn decompose_elementary(f: &MultiPoly2) -> Result<ElemExpansion> {
    let n = f.n_vars();
    if n == 0 || n > MAX_VARS {
        return Err(Error::InvalidParameter(format!(
            "variable count must be between 1 and {}, got {}",
            MAX_VARS, n
        )));
    }
    if !f.is_symmetric() {
        return Err(Error::NotSymmetric(
            "input changes under a variable permutation".into(),
        ));
    }
    let sigmas: Vec<MultiPoly2> = (1..=n).map(|k| sigma(n, k)).collect::<Result<_>>()?;
    let mut rem = f.clone();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    while let Some(lead) = rem.leading_term().map(|t| t.to_vec()) {
        if lead.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotSymmetric(format!(
                "leading exponents {:?} are not non-increasing",
                lead
            )));
        }
        let mut e = vec![0u8; n];
        for k in 0..n {
            e[k] = lead[k] - if k + 1 < n { lead[k + 1] } else { 0 };
        }
        let mut prod = MultiPoly2::one(n);
        for (k, &ek) in e.iter().enumerate() {
            if ek > 0 {
                prod = prod.mul(&sigmas[k].pow(ek as u32));
            }
        }
        if prod.leading_term() != Some(lead.as_slice()) {
            return Err(Error::CheckFailed(format!(
                "sigma-product leading term {:?} does not match target {:?}",
                prod.leading_term(),
                lead
            )));
        }
        rem = rem.add(&prod);
        if let Some(next) = rem.leading_term() {
            if next >= lead.as_slice() {
                return Err(Error::CheckFailed(
                    "elimination failed to reduce the leading term".into(),
                ));
            }
        }
        rows.push(e);
    }
    ElemExpansion::new(n, rows)
}

/// Check that an expansion reproduces `f` exactly when multiplied back out.
pub fn verify_expansion(expansion: &ElemExpansion, f: &MultiPoly2) -> Result<()> {
    let back = expansion.expand()?;
    if back == *f {
        Ok(())
    } else {
        let diff = back.add(f);
        Err(Error::CheckFailed(format!(
            "expansion does not reproduce the polynomial: {} monomials differ",
            diff.term_count()
        )))
    }
}

/// Recover the elementary-symmetric expansion of an unknown symmetric
/// polynomial from evaluations alone, as a route independent of
/// [`decompose_elementary`].
///
/// `oracle` evaluates the target polynomial at an arbitrary point of `ctx`.
/// Candidate sigma-products are all exponent rows of the given weighted
/// degree; random points then yield F2-linear equations for the candidate
/// coefficients, one equation per bit of the field representation.  The
/// system is solved by Gauss-Jordan elimination over F2 and must reach full
/// rank, so the recovered expansion is the unique one - a rank shortfall or
/// an inconsistent equation is reported, never patched.
pub fn decompose_by_interpolation<F>(
    ctx: &Arc<FieldCtx>,
    n_vars: usize,
    weighted_degree: u32,
    oracle: F,
    seed: u64,
) -> Result<ElemExpansion>
where
    F: Fn(&FieldCtx, &[FieldElem]) -> Result<FieldElem>,
{
    if ctx.characteristic() != 2 {
        return Err(Error::OddCharacteristic(ctx.characteristic()));
    }
    if ctx.degree() < 6 {
        return Err(Error::InvalidParameter(
            "interpolation needs a field of degree at least 6 over F2".into(),
        ));
    }
    if n_vars == 0 || n_vars > MAX_VARS {
        return Err(Error::InvalidParameter(format!(
            "variable count must be between 1 and {}, got {}",
            MAX_VARS, n_vars
        )));
    }
    if weighted_degree > 200 {
        return Err(Error::InvalidParameter(
            "weighted degree above 200 is outside the supported range".into(),
        ));
    }
    let cands = rows_of_weighted_degree(n_vars, weighted_degree);
    let ncand = cands.len();
    if ncand == 0 {
        return Err(Error::InvalidParameter(format!(
            "no sigma-products of weighted degree {} in {} variables",
            weighted_degree, n_vars
        )));
    }
    if ncand > 200_000 {
        return Err(Error::InvalidParameter(format!(
            "candidate space of size {} is outside the supported range",
            ncand
        )));
    }
    let maxes = max_exponents(n_vars, cands.iter());
    let words = (ncand + 63) / 64;
    let kbits = ctx.degree() as usize;

    struct PivotRow {
        bits: Vec<u64>,
        rhs: bool,
    }
    let mut pivots: Vec<Option<PivotRow>> = (0..ncand).map(|_| None).collect();
    let mut rank = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_points = (ncand / kbits + 1) * 6 + 64;

    // First set bit at or after `from`, if any.
    let next_set = |bits: &[u64], from: usize| -> Option<usize> {
        let mut w = from / 64;
        if w >= bits.len() {
            return None;
        }
        let masked = bits[w] & (!0u64 << (from % 64));
        if masked != 0 {
            return Some(w * 64 + masked.trailing_zeros() as usize);
        }
        w += 1;
        while w < bits.len() {
            if bits[w] != 0 {
                return Some(w * 64 + bits[w].trailing_zeros() as usize);
            }
            w += 1;
        }
        None
    };

    for _ in 0..max_points {
        if rank == ncand {
            break;
        }
        let point: Vec<FieldElem> = (0..n_vars).map(|_| ctx.random_elem(&mut rng)).collect();
        let y = oracle(ctx, &point)?;
        ctx.ensure(y)?;
        let sig = elementary_symmetric_values(ctx, &point)?;
        let tables = power_tables(ctx, &sig, &maxes);
        let mvals: Vec<u128> = cands
            .iter()
            .map(|row| {
                let mut prod = ctx.one();
                for (i, &e) in row.iter().enumerate() {
                    if e > 0 {
                        prod = ctx.mul(prod, tables[i][e as usize]);
                    }
                }
                prod.raw()
            })
            .collect();
        for bit in 0..kbits {
            let mut bits = vec![0u64; words];
            for (c, &mv) in mvals.iter().enumerate() {
                if (mv >> bit) & 1 == 1 {
                    bits[c / 64] |= 1u64 << (c % 64);
                }
            }
            let mut rhs = (y.raw() >> bit) & 1 == 1;
            // Reduce against every existing pivot, not just along the leading
            // bit: each pivot row's leading bit is its pivot column and it has
            // no other pivot columns set, so one ascending sweep clears them
            // all and leaves the first unpivoted set bit as the new pivot.
            let mut new_pivot: Option<usize> = None;
            let mut pos = 0usize;
            while let Some(b) = next_set(&bits, pos) {
                if let Some(p) = &pivots[b] {
                    for (w, pw) in bits.iter_mut().zip(&p.bits) {
                        *w ^= pw;
                    }
                    rhs ^= p.rhs;
                    pos = b; // bit b is now clear; nothing below b changed
                } else {
                    if new_pivot.is_none() {
                        new_pivot = Some(b);
                    }
                    pos = b + 1;
                }
            }
            match new_pivot {
                None => {
                    if rhs {
                        return Err(Error::CheckFailed(
                            "oracle value lies outside the candidate span".into(),
                        ));
                    }
                }
                Some(col) => {
                    // The reduced row has no existing pivot column set, so
                    // back-substituting it cannot disturb other pivots.
                    for q in pivots.iter_mut().flatten() {
                        if (q.bits[col / 64] >> (col % 64)) & 1 == 1 {
                            for (qw, w) in q.bits.iter_mut().zip(&bits) {
                                *qw ^= w;
                            }
                            q.rhs ^= rhs;
                        }
                    }
                    pivots[col] = Some(PivotRow { bits, rhs });
                    rank += 1;
                }
            }
        }
    }
    if rank < ncand {
        return Err(Error::CheckFailed(format!(
            "interpolation system reached rank {} of {}; more points did not help",
            rank, ncand
        )));
    }
    let rows: Vec<Vec<u8>> = cands
        .into_iter()
        .enumerate()
        .filter(|(c, _)| pivots[*c].as_ref().map(|p| p.rhs).unwrap_or(false))
        .map(|(_, row)| row)
        .collect();
    ElemExpansion::new(n_vars, rows)
}

/// All exponent rows (e_1, .., e_n) with sum k * e_k equal to `w`, in
/// ascending lexicographic order.
fn rows_of_weighted_degree(n_vars: usize, w: u32) -> Vec<Vec<u8>> {
    fn rec(pos: usize, n: usize, rem: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let weight = pos as u32 + 1;
        if pos == n - 1 {
            if rem % weight == 0 && rem / weight <= u8::MAX as u32 {
                cur.push((rem / weight) as u8);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let cap = (rem / weight).min(u8::MAX as u32);
        for e in 0..=cap {
            cur.push(e as u8);
            rec(pos + 1, n, rem - e * weight, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n_vars > 0 {
        rec(0, n_vars, w, &mut Vec::with_capacity(n_vars), &mut out);
    }
    out.sort_unstable();
    out
}

/// The shipped 218-row expansion table for the seven-variable pair-sum
/// numerator, as raw CSV.
pub fn shipped_expansion_csv() -> &'static str {
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/pair_sum_expansion.csv"))
}

static SHIPPED: Lazy<ElemExpansion> = Lazy::new(|| {
    ElemExpansion::from_csv(shipped_expansion_csv()).expect("shipped expansion table must parse")
});

/// The shipped seven-variable expansion, parsed once.
pub fn shipped_expansion() -> &'static ElemExpansion {
    &SHIPPED
}

/// Compare a computed expansion against the shipped table, after checking
/// the structural facts every row must satisfy: weighted degree 42 and at
/// least one positive exponent among e_1, e_2, e_5, e_6.
///
/// The structural check is what makes the table useful downstream: whenever
/// sigma_1 = sigma_2 = sigma_5 = sigma_6 = 0, every term has a vanishing
/// factor, so the whole sum is zero regardless of the remaining sigmas.
pub fn verify_against_table(expansion: &ElemExpansion) -> Result<()> {
    if expansion.n_vars() != 7 {
        return Err(Error::InvalidParameter(format!(
            "table comparison expects 7 variables, got {}",
            expansion.n_vars()
        )));
    }
    for row in expansion.rows() {
        let w = ElemExpansion::weighted_degree(row);
        if w != 42 {
            return Err(Error::TableMismatch(format!(
                "row {:?} has weighted degree {}, expected 42",
                row, w
            )));
        }
        if row[0] == 0 && row[1] == 0 && row[4] == 0 && row[5] == 0 {
            return Err(Error::TableMismatch(format!(
                "row {:?} has e1 = e2 = e5 = e6 = 0",
                row
            )));
        }
    }
    let shipped = shipped_expansion();
    if expansion == shipped {
        return Ok(());
    }
    let ours: BTreeSet<&Vec<u8>> = expansion.rows().iter().collect();
    let theirs: BTreeSet<&Vec<u8>> = shipped.rows().iter().collect();
    let missing: Vec<_> = theirs.difference(&ours).take(5).collect();
    let extra: Vec<_> = ours.difference(&theirs).take(5).collect();
    Err(Error::TableMismatch(format!(
        "computed {} rows vs {} shipped; missing e.g. {:?}; unexpected e.g. {:?}",
        expansion.len(),
        shipped.len(),
        missing,
        extra
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use rand::Rng;

    #[test]
    fn sigma_shapes_and_symmetry() {
        let s2 = sigma(4, 2).unwrap();
        assert_eq!(s2.term_count(), 6);
        assert!(s2.is_symmetric());
        assert!(s2.is_homogeneous(2));

        let s3 = sigma(3, 3).unwrap();
        assert_eq!(s3.terms().collect::<Vec<_>>(), vec![&[1u8, 1, 1][..]]);

        assert!(sigma(3, 0).unwrap() == MultiPoly2::one(3));
        assert!(sigma(3, 5).unwrap().is_zero());

        let asym = MultiPoly2::var(3, 0);
        assert!(!asym.is_symmetric());
        let sum_all = MultiPoly2::var(3, 0)
            .add(&MultiPoly2::var(3, 1))
            .add(&MultiPoly2::var(3, 2));
        assert!(sum_all.is_symmetric());
    }

    #[test]
    fn arithmetic_matches_field_evaluation() {
        let ctx = build_field(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = sigma(3, 2).unwrap().add(&MultiPoly2::var(3, 1).pow(3));
        let g = sigma(3, 1).unwrap().mul(&MultiPoly2::var(3, 0));
        for _ in 0..50 {
            let pt: Vec<FieldElem> = (0..3).map(|_| ctx.random_elem(&mut rng)).collect();
            let fv = f.eval(&ctx, &pt).unwrap();
            let gv = g.eval(&ctx, &pt).unwrap();
            assert_eq!(f.add(&g).eval(&ctx, &pt).unwrap(), ctx.add(fv, gv));
            assert_eq!(f.mul(&g).eval(&ctx, &pt).unwrap(), ctx.mul(fv, gv));
            assert_eq!(f.square().eval(&ctx, &pt).unwrap(), ctx.mul(fv, fv));
        }
        // Char-2 Frobenius on sums: squaring distributes over addition.
        assert_eq!(f.add(&g).square(), f.square().add(&g.square()));
    }

    #[test]
    fn smallest_numerators_and_their_decompositions() {
        // Two variables: the empty complementary product leaves x1*x2.
        let c2 = pair_sum_numerator(2).unwrap();
        assert_eq!(c2.terms().collect::<Vec<_>>(), vec![&[1u8, 1][..]]);
        let d2 = decompose_elementary(&c2).unwrap();
        assert_eq!(d2.rows(), &[vec![0u8, 1]]);

        // Three variables: expanded form is known to have 12 monomials of
        // total degree 6, and a four-term sigma-decomposition.
        let c3 = pair_sum_numerator(3).unwrap();
        assert_eq!(c3.term_count(), 12);
        assert!(c3.is_homogeneous(6));
        assert!(c3.is_symmetric());
        let d3 = decompose_elementary(&c3).unwrap();
        assert_eq!(
            d3.rows(),
            &[vec![0u8, 0, 2], vec![0u8, 3, 0], vec![1u8, 1, 1], vec![3u8, 0, 1]]
        );
        verify_expansion(&d3, &c3).unwrap();

        // The decomposition evaluates to the same thing as the direct
        // pair formula at arbitrary points.
        let ctx = build_field(2, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let pt: Vec<FieldElem> = (0..3).map(|_| ctx.random_elem(&mut rng)).collect();
            let direct = pair_sum_numerator_at(&ctx, &pt).unwrap();
            let sig = elementary_symmetric_values(&ctx, &pt).unwrap();
            assert_eq!(d3.evaluate(&ctx, &sig).unwrap(), direct);
            assert_eq!(c3.eval(&ctx, &pt).unwrap(), direct);
        }
    }

    #[test]
    fn decomposition_round_trips_on_random_symmetric_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            // Random F2-combination of sigma-products with small exponents.
            let n = 4usize;
            let mut rows: BTreeSet<Vec<u8>> = BTreeSet::new();
            for _ in 0..rng.gen_range(1..6) {
                let row: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3u8)).collect();
                if !rows.remove(&row) {
                    rows.insert(row);
                }
            }
            let expansion = ElemExpansion::new(n, rows.iter().cloned().collect()).unwrap();
            let poly = expansion.expand().unwrap();
            if poly.is_zero() {
                continue;
            }
            let back = decompose_elementary(&poly).unwrap();
            assert_eq!(back, expansion);
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(matches!(pair_sum_numerator(1), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            decompose_elementary(&MultiPoly2::var(3, 0)),
            Err(Error::NotSymmetric(_))
        ));
        let ctx = build_field(2, 4).unwrap();
        let exp = ElemExpansion::new(3, vec![vec![1, 0, 0]]).unwrap();
        assert!(matches!(
            exp.evaluate(&ctx, &[ctx.one()]),
            Err(Error::InvalidParameter(_))
        ));
        let odd = build_field(3, 2).unwrap();
        assert!(matches!(
            exp.evaluate(&odd, &[odd.one(), odd.one(), odd.one()]),
            Err(Error::OddCharacteristic(3))
        ));
        assert!(ElemExpansion::new(2, vec![vec![1, 0], vec![1, 0]]).is_err());
    }

    #[test]
    fn interpolation_agrees_with_elimination_on_three_variables() {
        let ctx = build_field(2, 6).unwrap();
        let by_elim = decompose_elementary(&pair_sum_numerator(3).unwrap()).unwrap();
        let by_interp =
            decompose_by_interpolation(&ctx, 3, 6, |c, pt| pair_sum_numerator_at(c, pt), 42)
                .unwrap();
        assert_eq!(by_elim, by_interp);
    }

    #[test]
    fn shipped_table_shape_and_round_trip() {
        let table = shipped_expansion();
        assert_eq!(table.n_vars(), 7);
        assert_eq!(table.len(), 218);
        assert!(table.is_weighted_homogeneous(42));
        assert_eq!(table.rows()[0], vec![0, 0, 0, 0, 2, 3, 2]);
        assert_eq!(table.rows()[217], vec![6, 0, 0, 0, 1, 4, 1]);
        for row in table.rows() {
            assert!(
                row[0] > 0 || row[1] > 0 || row[4] > 0 || row[5] > 0,
                "row {:?} would survive the sparse sigma pattern",
                row
            );
        }
        // to_csv reproduces the shipped file byte for byte.
        assert_eq!(table.to_csv(), shipped_expansion_csv());
        // And the shipped table passes its own verification.
        verify_against_table(table).unwrap();
    }

    #[test]
    fn table_matches_direct_formula_at_random_points() {
        let ctx = build_field(2, 8).unwrap();
        let table = shipped_expansion();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let pt: Vec<FieldElem> = (0..7).map(|_| ctx.random_elem(&mut rng)).collect();
            let direct = pair_sum_numerator_at(&ctx, &pt).unwrap();
            let sig = elementary_symmetric_values(&ctx, &pt).unwrap();
            assert_eq!(table.evaluate(&ctx, &sig).unwrap(), direct);
        }
    }

    #[test]
    fn sparse_sigma_pattern_annihilates_the_table() {
        // Whenever sigma_1 = sigma_2 = sigma_5 = sigma_6 = 0 the structural
        // property of the rows forces the value to zero, independent of the
        // remaining sigma values.
        let ctx = build_field(2, 6).unwrap();
        let table = shipped_expansion();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let s3 = ctx.random_elem(&mut rng);
            let s4 = ctx.random_elem(&mut rng);
            let s7 = ctx.random_elem(&mut rng);
            let z = ctx.zero();
            let v = table.evaluate(&ctx, &[z, z, s3, s4, z, z, s7]).unwrap();
            assert!(v.is_zero());
        }
    }

    #[test]
    fn elementary_values_match_polynomial_coefficients() {
        // In characteristic 2 the monic polynomial with roots r_i has
        // coefficient sigma_k at degree n - k.
        let ctx = build_field(2, 4).unwrap();
        let roots: Vec<FieldElem> = ctx.nonzero_elements().take(5).collect();
        let sig = elementary_symmetric_values(&ctx, &roots).unwrap();
        let mut poly = crate::poly::Poly::one(&ctx);
        for &r in &roots {
            let linear = crate::poly::Poly::from_elems(&ctx, &[r, ctx.one()]).unwrap();
            poly = poly.mul(&linear);
        }
        for (k, &s) in sig.iter().enumerate() {
            assert_eq!(poly.coeff(roots.len() - (k + 1)), s);
        }
    }
}
