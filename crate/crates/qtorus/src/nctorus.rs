//! The star product on cosine symbols and the noncommutative torus.
//!
//! Symbols `C(p,q)` multiply by the product-to-sum rule
//!
//! ```text
//! C(m,n) ★ C(p,q) = t^{mq−np} C(m+p,n+q) + t^{np−mq} C(m−p,n−q)
//! ```
//!
//! and Weyl words `e_{(p,q)} = t^{−pq} U^p V^q` multiply by
//! `e_{(m,n)} e_{(p,q)} = t^{mq−np} e_{(m+p,n+q)}`. Both work over any
//! [`ScalarRing`]: the exact field at a fixed level, or formal Laurent
//! polynomials in `t`.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::cyclotomic::{CycloContext, CycloElement};
use crate::error::{Error, Result};
use crate::linalg::FieldMatrix;
use crate::observables::c_matrix;
use crate::rational::Rational;
use crate::torus_space::OperatorMatrix;

/// A commutative ring containing an invertible `t`.
pub trait ScalarRing: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug + fmt::Display + Serialize;

    fn zero(&self) -> Self::Elem;
    fn int(&self, n: i64) -> Self::Elem;
    fn t_power(&self, e: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

impl ScalarRing for CycloContext {
    type Elem = CycloElement;

    fn zero(&self) -> CycloElement {
        CycloContext::zero(self)
    }
    fn int(&self, n: i64) -> CycloElement {
        CycloElement::from_int(self, n)
    }
    fn t_power(&self, e: i64) -> CycloElement {
        CycloContext::t_power(self, e)
    }
    fn add(&self, a: &CycloElement, b: &CycloElement) -> CycloElement {
        a + b
    }
    fn mul(&self, a: &CycloElement, b: &CycloElement) -> CycloElement {
        a * b
    }
    fn is_zero(&self, a: &CycloElement) -> bool {
        a.is_zero()
    }
}

/// The ring `Q[t, t^{−1}]`, with no relation imposed on `t`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Laurent;

/// An element of `Q[t, t^{−1}]`: exponent to nonzero coefficient.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly(BTreeMap<i64, Rational>);

impl LaurentPoly {
    pub fn monomial(coeff: Rational, e: i64) -> Self {
        let mut m = BTreeMap::new();
        if !coeff.is_zero() {
            m.insert(e, coeff);
        }
        LaurentPoly(m)
    }

    pub fn terms(&self) -> &BTreeMap<i64, Rational> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Substitutes `t = e^{iπ/2r}`.
    pub fn specialize(&self, ctx: &CycloContext) -> CycloElement {
        let mut acc = ctx.zero();
        for (&e, c) in &self.0 {
            acc += &ctx.t_power(e).scale(c);
        }
        acc
    }

    fn add_term(&mut self, e: i64, c: &Rational) {
        let slot = self.0.entry(e).or_insert(Rational::ZERO);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&e);
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (&e, c)) in self.0.iter().rev().enumerate() {
            let neg = c.signum() < 0;
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            match e {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => write!(f, "t^{e}")?,
                _ => write!(f, "{a}*t^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (e, c) in &self.0 {
            map.serialize_entry(&e.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

impl ScalarRing for Laurent {
    type Elem = LaurentPoly;

    fn zero(&self) -> LaurentPoly {
        LaurentPoly::default()
    }
    fn int(&self, n: i64) -> LaurentPoly {
        LaurentPoly::monomial(Rational::from_int(n), 0)
    }
    fn t_power(&self, e: i64) -> LaurentPoly {
        LaurentPoly::monomial(Rational::ONE, e)
    }
    fn add(&self, a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        let mut out = a.clone();
        for (&e, c) in &b.0 {
            out.add_term(e, c);
        }
        out
    }
    fn mul(&self, a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::default();
        for (&ea, ca) in &a.0 {
            for (&eb, cb) in &b.0 {
                out.add_term(ea + eb, &(ca * cb));
            }
        }
        out
    }
    fn is_zero(&self, a: &LaurentPoly) -> bool {
        a.is_zero()
    }
}

/// A finite linear combination indexed by lattice points, kept without
/// zero coefficients.
#[derive(Clone, PartialEq)]
struct Support<R: ScalarRing> {
    ring: R,
    terms: BTreeMap<(i64, i64), R::Elem>,
}

impl<R: ScalarRing> Support<R> {
    fn new(ring: &R) -> Self {
        Support { ring: ring.clone(), terms: BTreeMap::new() }
    }

    fn add_term(&mut self, key: (i64, i64), c: &R::Elem) {
        if self.ring.is_zero(c) {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(slot) => {
                *slot = self.ring.add(slot, c);
                if self.ring.is_zero(slot) {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::MixedRings)
        }
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((p, q), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{name}({p},{q})")?;
        }
        Ok(())
    }
}

impl<R: ScalarRing> Serialize for Support<R> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a, E> {
            p: i64,
            q: i64,
            coeff: &'a E,
        }
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (&(p, q), coeff) in &self.terms {
            seq.serialize_element(&Term { p, q, coeff })?;
        }
        seq.end()
    }
}

/// Orbit representative of `{(p,q), (−p,−q)}`: `p > 0`, or `p = 0, q ≥ 0`.
pub fn canonical_orbit(p: i64, q: i64) -> (i64, i64) {
    if p > 0 || (p == 0 && q >= 0) {
        (p, q)
    } else {
        (-p, -q)
    }
}

/// `Σ c_{pq} C(p,q)` with `C(p,q) = C(−p,−q)`.
#[derive(Clone, PartialEq)]
pub struct SymbolElement<R: ScalarRing>(Support<R>);

impl<R: ScalarRing> SymbolElement<R> {
    pub fn zero(ring: &R) -> Self {
        SymbolElement(Support::new(ring))
    }

    /// The single symbol `C(p,q)`.
    pub fn symbol(ring: &R, p: i64, q: i64) -> Self {
        let mut s = Self::zero(ring);
        s.add_term(p, q, &ring.int(1));
        s
    }

    pub fn ring(&self) -> &R {
        &self.0.ring
    }

    /// Terms keyed by canonical orbit representative.
    pub fn terms(&self) -> &BTreeMap<(i64, i64), R::Elem> {
        &self.0.terms
    }

    pub fn get(&self, p: i64, q: i64) -> R::Elem {
        self.0.terms.get(&canonical_orbit(p, q)).cloned().unwrap_or_else(|| self.0.ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.terms.is_empty()
    }

    pub fn add_term(&mut self, p: i64, q: i64, c: &R::Elem) {
        self.0.add_term(canonical_orbit(p, q), c);
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.0.check_ring(&other.0)?;
        let mut out = self.clone();
        for (&(p, q), c) in &other.0.terms {
            out.add_term(p, q, c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &R::Elem) -> Self {
        let mut out = Self::zero(&self.0.ring);
        for (&(p, q), c) in &self.0.terms {
            out.add_term(p, q, &self.0.ring.mul(c, s));
        }
        out
    }

    /// The linear map `C(p,q) ↦ e_{(p,q)} + e_{(−p,−q)}`.
    pub fn to_nc_word(&self) -> NCWord<R> {
        let ring = &self.0.ring;
        let mut out = NCWord::zero(ring);
        for (&(p, q), c) in &self.0.terms {
            for (&key, d) in &nc_cosine(ring, p, q).0.terms {
                out.0.add_term(key, &ring.mul(c, d));
            }
        }
        out
    }
}

impl SymbolElement<Laurent> {
    pub fn specialize(&self, ctx: &CycloContext) -> SymbolElement<CycloContext> {
        let mut out = SymbolElement::zero(ctx);
        for (&(p, q), c) in &self.0.terms {
            out.add_term(p, q, &c.specialize(ctx));
        }
        out
    }
}

impl<R: ScalarRing> fmt::Display for SymbolElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_with(f, "C")
    }
}

impl<R: ScalarRing> fmt::Debug for SymbolElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<R: ScalarRing> Serialize for SymbolElement<R> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Bilinear extension of the product-to-sum rule.
pub fn star_multiply<R: ScalarRing>(a: &SymbolElement<R>, b: &SymbolElement<R>) -> Result<SymbolElement<R>> {
    a.0.check_ring(&b.0)?;
    let ring = a.ring();
    let mut out = SymbolElement::zero(ring);
    for (&(m, n), x) in a.terms() {
        for (&(p, q), y) in b.terms() {
            let d = m * q - n * p;
            let xy = ring.mul(x, y);
            out.add_term(m + p, n + q, &ring.mul(&xy, &ring.t_power(d)));
            out.add_term(m - p, n - q, &ring.mul(&xy, &ring.t_power(-d)));
        }
    }
    Ok(out)
}

/// `Σ c_{pq} e_{(p,q)}` in the normal-ordered basis `e_{(p,q)} = t^{−pq}U^pV^q`.
#[derive(Clone, PartialEq)]
pub struct NCWord<R: ScalarRing>(Support<R>);

impl<R: ScalarRing> NCWord<R> {
    pub fn zero(ring: &R) -> Self {
        NCWord(Support::new(ring))
    }

    /// The single monomial `e_{(p,q)}`.
    pub fn monomial(ring: &R, p: i64, q: i64) -> Self {
        let mut w = Self::zero(ring);
        w.add_term(p, q, &ring.int(1));
        w
    }

    pub fn ring(&self) -> &R {
        &self.0.ring
    }

    pub fn terms(&self) -> &BTreeMap<(i64, i64), R::Elem> {
        &self.0.terms
    }

    pub fn get(&self, p: i64, q: i64) -> R::Elem {
        self.0.terms.get(&(p, q)).cloned().unwrap_or_else(|| self.0.ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.terms.is_empty()
    }

    pub fn add_term(&mut self, p: i64, q: i64, c: &R::Elem) {
        self.0.add_term((p, q), c);
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.0.check_ring(&other.0)?;
        let mut out = self.clone();
        for (&k, c) in &other.0.terms {
            out.0.add_term(k, c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &R::Elem) -> Self {
        let mut out = Self::zero(&self.0.ring);
        for (&k, c) in &self.0.terms {
            out.0.add_term(k, &self.0.ring.mul(c, s));
        }
        out
    }
}

impl NCWord<Laurent> {
    pub fn specialize(&self, ctx: &CycloContext) -> NCWord<CycloContext> {
        let mut out = NCWord::zero(ctx);
        for (&k, c) in &self.0.terms {
            out.0.add_term(k, &c.specialize(ctx));
        }
        out
    }
}

impl<R: ScalarRing> fmt::Display for NCWord<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_with(f, "e")
    }
}

impl<R: ScalarRing> fmt::Debug for NCWord<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<R: ScalarRing> Serialize for NCWord<R> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Bilinear extension of `e_{(m,n)} e_{(p,q)} = t^{mq−np} e_{(m+p,n+q)}`.
pub fn weyl_multiply<R: ScalarRing>(a: &NCWord<R>, b: &NCWord<R>) -> Result<NCWord<R>> {
    a.0.check_ring(&b.0)?;
    let ring = a.ring();
    let mut out = NCWord::zero(ring);
    for (&(m, n), x) in a.terms() {
        for (&(p, q), y) in b.terms() {
            let c = ring.mul(&ring.mul(x, y), &ring.t_power(m * q - n * p));
            out.add_term(m + p, n + q, &c);
        }
    }
    Ok(out)
}

/// `t^{−pq}(U^pV^q + U^{−p}V^{−q}) = e_{(p,q)} + e_{(−p,−q)}`.
pub fn nc_cosine<R: ScalarRing>(ring: &R, p: i64, q: i64) -> NCWord<R> {
    let mut w = NCWord::monomial(ring, p, q);
    w.add_term(-p, -q, &ring.int(1));
    w
}

/// The clock and shift matrices on `C^{2r}`: `U = diag(t^{2j})`,
/// `V e_j = e_{j+1}` with indices mod `2r`, so that `UV = t² VU`.
#[derive(Clone, Debug)]
pub struct ClockShift {
    ctx: CycloContext,
    u: FieldMatrix,
    v: FieldMatrix,
}

pub fn clock_shift_model(ctx: &CycloContext) -> ClockShift {
    let n = 2 * ctx.level() as usize;
    let u = FieldMatrix::from_fn(ctx, n, n, |i, j| if i == j { ctx.t_power(2 * i as i64) } else { ctx.zero() });
    let v = FieldMatrix::from_fn(ctx, n, n, |i, j| if i == (j + 1) % n { ctx.one() } else { ctx.zero() });
    ClockShift { ctx: ctx.clone(), u, v }
}

impl ClockShift {
    pub fn size(&self) -> usize {
        self.u.rows()
    }

    pub fn u(&self) -> &FieldMatrix {
        &self.u
    }

    pub fn v(&self) -> &FieldMatrix {
        &self.v
    }

    /// `e_{(p,q)} = t^{−pq} U^p V^q`, which sends basis vector `j` to
    /// `t^{2p(j+q) − pq}` times basis vector `j+q`.
    pub fn monomial(&self, p: i64, q: i64) -> FieldMatrix {
        let n = self.size() as i64;
        FieldMatrix::from_fn(&self.ctx, n as usize, n as usize, |i, j| {
            if (j as i64 + q).rem_euclid(n) == i as i64 {
                self.ctx.t_power(2 * p * (j as i64 + q) - p * q)
            } else {
                self.ctx.zero()
            }
        })
    }

    pub fn evaluate(&self, w: &NCWord<CycloContext>) -> Result<FieldMatrix> {
        if *w.ring() != self.ctx {
            return Err(Error::MixedRings);
        }
        let n = self.size();
        let mut acc = FieldMatrix::zero(&self.ctx, n, n);
        for (&(p, q), c) in w.terms() {
            acc = &acc + &self.monomial(p, q).scale(c);
        }
        Ok(acc)
    }
}

/// Linear extension of `C(p,q) ↦ c_matrix(p,q)`.
pub fn rep_operator(ctx: &CycloContext, a: &SymbolElement<CycloContext>) -> Result<OperatorMatrix> {
    if a.ring() != ctx {
        return Err(Error::MixedRings);
    }
    let mut acc = OperatorMatrix::zero(ctx);
    for (&(p, q), c) in a.terms() {
        acc = &acc + &c_matrix(ctx, p, q).scale(&c.clone().into());
    }
    Ok(acc)
}

/// Kernels of symbol→operator and symbol→NC word on a truncated span.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub level: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub symbols: usize,
    pub dim_ker_op: usize,
    pub dim_ker_nc: usize,
    pub nc_subset_op: bool,
}

/// Orbit representatives with `0 ≤ p ≤ n`, `|q| ≤ n`, in key order.
pub fn truncated_symbols(n: u32) -> Vec<(i64, i64)> {
    let n = n as i64;
    let mut out: Vec<(i64, i64)> = (0..=n).map(|q| (0, q)).collect();
    for p in 1..=n {
        out.extend((-n..=n).map(|q| (p, q)));
    }
    out
}

pub fn kernel_compare(ctx: &CycloContext, n: u32) -> KernelReport {
    let symbols = truncated_symbols(n);
    let dim = ctx.dim();

    let op_cols: Vec<Vec<CycloElement>> = symbols
        .iter()
        .map(|&(p, q)| {
            c_matrix(ctx, p, q)
                .entries()
                .iter()
                .map(|s| s.clone().into_value().expect("cosine matrices are ungraded"))
                .collect()
        })
        .collect();
    let op = FieldMatrix::from_columns(ctx, dim * dim, &op_cols);

    let side = 2 * n as usize + 1;
    let coord = |p: i64, q: i64| (p + n as i64) as usize * side + (q + n as i64) as usize;
    let nc_cols: Vec<Vec<CycloElement>> = symbols
        .iter()
        .map(|&(p, q)| {
            let mut col = vec![ctx.zero(); side * side];
            for (&(a, b), c) in nc_cosine(ctx, p, q).terms() {
                col[coord(a, b)] = c.clone();
            }
            col
        })
        .collect();
    let nc = FieldMatrix::from_columns(ctx, side * side, &nc_cols);

    let ker_nc = nc.kernel_basis();
    let nc_subset_op = ker_nc.iter().all(|v| op.apply(v).iter().all(CycloElement::is_zero));
    KernelReport {
        level: ctx.level(),
        n,
        symbols: symbols.len(),
        dim_ker_op: symbols.len() - op.rank(),
        dim_ker_nc: ker_nc.len(),
        nc_subset_op,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(r: i64) -> CycloContext {
        CycloContext::new(r).unwrap()
    }

    fn t(e: i64) -> LaurentPoly {
        Laurent.t_power(e)
    }

    #[test]
    fn weyl_examples() {
        let e10 = NCWord::monomial(&Laurent, 1, 0);
        let e01 = NCWord::monomial(&Laurent, 0, 1);
        let e11 = NCWord::monomial(&Laurent, 1, 1);
        assert_eq!(weyl_multiply(&e10, &e01).unwrap(), e11.scale(&t(1)));
        assert_eq!(weyl_multiply(&e01, &e10).unwrap(), e11.scale(&t(-1)));
        let one = NCWord::monomial(&Laurent, 0, 0);
        let w = nc_cosine(&Laurent, 2, -3);
        assert_eq!(weyl_multiply(&one, &w).unwrap(), w);
        assert_eq!(weyl_multiply(&w, &one).unwrap(), w);
    }

    #[test]
    fn nc_cosine_examples() {
        let w = nc_cosine(&Laurent, 0, 0);
        assert_eq!(w.terms().len(), 1);
        assert_eq!(w.get(0, 0), Laurent.int(2));
        let w = nc_cosine(&Laurent, 1, 0);
        assert_eq!(w.get(1, 0), Laurent.int(1));
        assert_eq!(w.get(-1, 0), Laurent.int(1));
    }

    #[test]
    fn star_examples() {
        let a = SymbolElement::symbol(&Laurent, 1, 0);
        let b = SymbolElement::symbol(&Laurent, 0, 1);
        let mut expect = SymbolElement::zero(&Laurent);
        expect.add_term(1, 1, &t(1));
        expect.add_term(1, -1, &t(-1));
        assert_eq!(star_multiply(&a, &b).unwrap(), expect);

        let one = SymbolElement::symbol(&Laurent, 0, 0);
        let c = SymbolElement::symbol(&Laurent, -2, 3);
        assert_eq!(star_multiply(&c, &one).unwrap(), c.scale(&Laurent.int(2)));
        assert_eq!(c.terms().keys().next(), Some(&(2, -3)));
    }

    #[test]
    fn star_fixed_triple() {
        let a = SymbolElement::symbol(&Laurent, 1, 0);
        let b = SymbolElement::symbol(&Laurent, 0, 1);
        let c = SymbolElement::symbol(&Laurent, 1, 1);
        let left = star_multiply(&star_multiply(&a, &b).unwrap(), &c).unwrap();
        let right = star_multiply(&a, &star_multiply(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
        // t·C(1,1)★C(1,1) + t^{-1}·C(1,-1)★C(1,1)
        let mut expect = SymbolElement::zero(&Laurent);
        expect.add_term(0, 0, &t(1));
        expect.add_term(2, 2, &t(1));
        expect.add_term(2, 0, &t(1));
        expect.add_term(0, -2, &t(-3));
        assert_eq!(left, expect);
    }

    #[test]
    fn mixed_rings_rejected() {
        let a = SymbolElement::symbol(&ctx(3), 1, 0);
        let b = SymbolElement::symbol(&ctx(4), 1, 0);
        assert_eq!(star_multiply(&a, &b), Err(Error::MixedRings));
        let u = NCWord::monomial(&ctx(3), 1, 0);
        let v = NCWord::monomial(&ctx(5), 1, 0);
        assert_eq!(weyl_multiply(&u, &v), Err(Error::MixedRings));
        assert_eq!(rep_operator(&ctx(4), &a), Err(Error::MixedRings));
    }

    #[test]
    fn structure_constants_match() {
        for (m, n, p, q) in [(1, 0, 0, 1), (2, -1, 3, 1), (0, 0, 1, 1), (1, 1, 1, 1), (-2, 3, 1, -4)] {
            let a = SymbolElement::symbol(&Laurent, m, n);
            let b = SymbolElement::symbol(&Laurent, p, q);
            let star = star_multiply(&a, &b).unwrap().to_nc_word();
            let weyl = weyl_multiply(&a.to_nc_word(), &b.to_nc_word()).unwrap();
            assert_eq!(star, weyl, "({m},{n})({p},{q})");
        }
    }

    #[test]
    fn clock_shift_relations() {
        for r in 3..=5 {
            let c = ctx(r);
            let cs = clock_shift_model(&c);
            let uv = cs.u() * cs.v();
            let vu = cs.v() * cs.u();
            assert_eq!(uv, vu.scale(&c.t_power(2)));
            let mut up = FieldMatrix::identity(&c, cs.size());
            let mut vp = up.clone();
            for _ in 0..2 * r {
                up = &up * cs.u();
                vp = &vp * cs.v();
            }
            assert_eq!(up, FieldMatrix::identity(&c, cs.size()));
            assert_eq!(vp, FieldMatrix::identity(&c, cs.size()));
        }
    }

    #[test]
    fn monomial_matches_matrix_powers() {
        let c = ctx(3);
        let cs = clock_shift_model(&c);
        let n = cs.size();
        let power = |m: &FieldMatrix, e: i64| {
            let mut acc = FieldMatrix::identity(&c, n);
            for _ in 0..e.rem_euclid(n as i64) {
                acc = &acc * m;
            }
            acc
        };
        for p in -4..=4 {
            for q in -4..=4 {
                let direct = &power(cs.u(), p) * &power(cs.v(), q);
                assert_eq!(cs.monomial(p, q), direct.scale(&c.t_power(-p * q)), "({p},{q})");
            }
        }
    }

    #[test]
    fn rep_examples() {
        let c = ctx(3);
        let one = SymbolElement::symbol(&c, 0, 0);
        assert_eq!(
            rep_operator(&c, &one).unwrap(),
            OperatorMatrix::identity(&c).scale(&CycloElement::from_int(&c, 2).into())
        );
        let a = SymbolElement::symbol(&c, 1, 0);
        let b = SymbolElement::symbol(&c, 0, 1);
        let ab = star_multiply(&a, &b).unwrap();
        assert_eq!(
            rep_operator(&c, &ab).unwrap(),
            &rep_operator(&c, &a).unwrap() * &rep_operator(&c, &b).unwrap()
        );
        let mut neg = SymbolElement::zero(&c);
        neg.add_term(-2, -1, &c.one());
        assert_eq!(rep_operator(&c, &neg).unwrap(), c_matrix(&c, 2, 1));
    }

    #[test]
    fn kernel_compare_small() {
        for r in 3..=4 {
            let rep = kernel_compare(&ctx(r), 0);
            assert_eq!((rep.symbols, rep.dim_ker_op, rep.dim_ker_nc), (1, 0, 0));
            assert!(rep.nc_subset_op);
        }
        let rep = kernel_compare(&ctx(3), 2);
        assert_eq!(rep.symbols, 13);
        assert!(rep.symbols - rep.dim_ker_op <= 4);
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["N"], 2);
        assert_eq!(json["level"], 3);
    }

    #[test]
    fn laurent_display_and_specialize() {
        let x = Laurent.add(&t(3), &Laurent.mul(&Laurent.int(-2), &t(-1)));
        assert_eq!(x.to_string(), "t^3 - 2*t^-1");
        let c = ctx(3);
        assert_eq!(x.specialize(&c), c.t_power(3) - c.t_power(-1) - c.t_power(-1));
        assert_eq!(serde_json::to_string(&x).unwrap(), r#"{"-1":"-2","3":"1"}"#);
    }

    fn symbol_strategy() -> impl Strategy<Value = SymbolElement<Laurent>> {
        prop::collection::vec((-5i64..=5, -5i64..=5, -3i64..=3, -3i64..=3), 1..4).prop_map(|terms| {
            let mut s = SymbolElement::zero(&Laurent);
            for (p, q, c, e) in terms {
                s.add_term(p, q, &LaurentPoly::monomial(Rational::from_int(c), e));
            }
            s
        })
    }

    fn word_strategy() -> impl Strategy<Value = NCWord<Laurent>> {
        prop::collection::vec((-5i64..=5, -5i64..=5, -3i64..=3, -3i64..=3), 1..4).prop_map(|terms| {
            let mut w = NCWord::zero(&Laurent);
            for (p, q, c, e) in terms {
                w.add_term(p, q, &LaurentPoly::monomial(Rational::from_int(c), e));
            }
            w
        })
    }

    proptest! {
        #[test]
        fn star_is_associative(a in symbol_strategy(), b in symbol_strategy(), c in symbol_strategy()) {
            let left = star_multiply(&star_multiply(&a, &b).unwrap(), &c).unwrap();
            let right = star_multiply(&a, &star_multiply(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn weyl_is_associative(a in word_strategy(), b in word_strategy(), c in word_strategy()) {
            let left = weyl_multiply(&weyl_multiply(&a, &b).unwrap(), &c).unwrap();
            let right = weyl_multiply(&a, &weyl_multiply(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(&left, &right);
            let k = ctx(4);
            let (a, b, c) = (a.specialize(&k), b.specialize(&k), c.specialize(&k));
            let left_k = weyl_multiply(&weyl_multiply(&a, &b).unwrap(), &c).unwrap();
            prop_assert_eq!(left_k, left.specialize(&k));
        }

        #[test]
        fn star_matches_weyl(a in symbol_strategy(), b in symbol_strategy()) {
            let star = star_multiply(&a, &b).unwrap().to_nc_word();
            let weyl = weyl_multiply(&a.to_nc_word(), &b.to_nc_word()).unwrap();
            prop_assert_eq!(star, weyl);
        }
    }
}
