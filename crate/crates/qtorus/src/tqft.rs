//! Torus-link brackets computed with the TQFT-with-corners gluing rules.
//!
//! The `(p', q')` curve is reached from the meridian by a word in the torus
//! moves `S` and `T`, read off the negative continued fraction of `p'/q'`.
//! The bracket `<S(cp', cq') V^k, V^m>` is then
//!
//! ```text
//! <W⁻¹ · diag([cj]/[j]) · W · V^k, V^m>,   W = S T^{−a_n} S ⋯ S T^{−a_1} S,
//! ```
//!
//! where `diag([cj]/[j])` is what is left of the colored solid torus after
//! gluing (`[cj]/X` from its `S` move, `X/[j]` from the annulus gluing).
//! Each summation index of the iterated Gauss sum is one matrix-vector
//! contraction, so a bracket costs `O(n r²)`. The literal nested sum is kept
//! as an oracle for tiny cases, and [`collapse_via_lemma`] replays the
//! closed-form collapse one Gauss-sum identity at a time.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::cyclotomic::{CycloContext, CycloElement, Scalar};
use crate::error::{Error, Result};
use crate::observables::SlopeData;
use crate::torus_space::{
    check_index, pairing, pairing_vectors, smove_matrix, tmove_power, OperatorMatrix, TorusVector,
};

/// Integer list `a_1, …, a_n` with
/// `q'/p' = −1/(−a_1 − 1/(−a_2 − ⋯ − 1/(−a_n)))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ContinuedFraction {
    terms: Vec<i64>,
}

impl ContinuedFraction {
    pub fn new(terms: Vec<i64>) -> Self {
        ContinuedFraction { terms }
    }

    pub fn terms(&self) -> &[i64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Primitive `(p', q')`, up to a common sign, with `q'/p'` the value of
    /// the fraction. The empty fraction is `0` and gives `(1, 0)`.
    pub fn slope(&self) -> (i64, i64) {
        // w = x/y, evaluated from the innermost term outwards
        let (mut x, mut y) = (0i64, 1i64);
        for &a in self.terms.iter().rev() {
            (x, y) = (-y, x - a * y);
        }
        let g = x.gcd(&y);
        (y / g, x / g)
    }

    /// `q'/p'` as an exact rational, `None` when `p' = 0`.
    pub fn value(&self) -> Option<Ratio<i64>> {
        let (p, q) = self.slope();
        (p != 0).then(|| Ratio::new(q, p))
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.terms)
    }
}

/// Negative (Hirzebruch–Jung) expansion of a slope with `p'q' ≠ 0`:
/// `a_1` is any integer and `a_i ≥ 2` for `i ≥ 2`.
pub fn neg_cfrac(p: i64, q: i64) -> Result<ContinuedFraction> {
    if p == 0 || q == 0 {
        return Err(Error::DegenerateSlope(p, q));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::NotPrimitive(p, q));
    }
    // p'/q' = a_1 − 1/(a_2 − 1/(⋯)), each tail > 1
    let mut v = Ratio::new(p, q);
    let mut terms = Vec::new();
    loop {
        let a = v.ceil().to_integer();
        terms.push(a);
        if v.is_integer() {
            return Ok(ContinuedFraction { terms });
        }
        v = (Ratio::from_integer(a) - v).recip();
    }
}

/// Expansion for any primitive slope. The longitude `(±1, 0)` gets the
/// empty fraction (move word `S`) and the meridian `(0, ±1)` gets `[0]`
/// (move word `S T⁰ S`).
pub fn slope_expansion(p: i64, q: i64) -> Result<ContinuedFraction> {
    if p.gcd(&q) != 1 {
        return Err(Error::NotPrimitive(p, q));
    }
    match (p, q) {
        (_, 0) => Ok(ContinuedFraction::new(vec![])),
        (0, _) => Ok(ContinuedFraction::new(vec![0])),
        _ => neg_cfrac(p, q),
    }
}

type Sl2 = [[i64; 2]; 2];

fn sl2_mul(a: &Sl2, b: &Sl2) -> Sl2 {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// A torus move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Move {
    S,
    /// `T^e`
    T(i64),
}

impl Move {
    fn sl2(self) -> Sl2 {
        match self {
            Move::S => [[0, -1], [1, 0]],
            Move::T(e) => [[1, e], [0, 1]],
        }
    }

    fn matrix(self, ctx: &CycloContext) -> OperatorMatrix {
        match self {
            Move::S => smove_matrix(ctx),
            Move::T(e) => tmove_power(ctx, e),
        }
    }
}

/// A word in the torus moves, stored in order of application: the word
/// `S T^{−a_n} S ⋯ S T^{−a_1} S` is `[S, T^{−a_1}, S, …, T^{−a_n}, S]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveWord {
    letters: Vec<Move>,
}

impl MoveWord {
    pub fn new(letters: Vec<Move>) -> Self {
        MoveWord { letters }
    }

    pub fn from_cfrac(cf: &ContinuedFraction) -> Self {
        let mut letters = vec![Move::S];
        for &a in cf.terms() {
            letters.push(Move::T(-a));
            letters.push(Move::S);
        }
        MoveWord { letters }
    }

    /// The word taking the meridian to the primitive slope `(p', q')`.
    pub fn for_slope(p: i64, q: i64) -> Result<Self> {
        Ok(Self::from_cfrac(&slope_expansion(p, q)?))
    }

    pub fn letters(&self) -> &[Move] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Inverse word. `S` is its own inverse on the graded torus space.
    pub fn inverse(&self) -> Self {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|m| match m {
                Move::S => Move::S,
                Move::T(e) => Move::T(-e),
            })
            .collect();
        MoveWord { letters }
    }

    /// The integer matrix `L_last ⋯ L_first` with `S = [[0,−1],[1,0]]`,
    /// `T = [[1,1],[0,1]]`.
    pub fn sl2_matrix(&self) -> Sl2 {
        self.letters.iter().fold([[1, 0], [0, 1]], |acc, m| sl2_mul(&m.sl2(), &acc))
    }

    /// The composite operator on `V(T²)`.
    pub fn operator(&self, ctx: &CycloContext) -> OperatorMatrix {
        self.letters
            .iter()
            .fold(OperatorMatrix::identity(ctx), |acc, m| &m.matrix(ctx) * &acc)
    }

    /// Applies the word to a vector one letter at a time.
    pub fn apply(&self, v: &TorusVector) -> Result<TorusVector> {
        let ctx = v.context().clone();
        let s = smove_matrix(&ctx);
        let mut cur = v.clone();
        for m in &self.letters {
            cur = match m {
                Move::S => s.apply(&cur)?,
                Move::T(e) => {
                    let coeffs = cur
                        .coeffs()
                        .iter()
                        .enumerate()
                        .map(|(i, c)| {
                            let j = i as i64 + 1;
                            c * &Scalar::from(ctx.t_power(e * (j * j - 1)))
                        })
                        .collect();
                    TorusVector::from_coeffs(&ctx, coeffs)?
                }
            };
        }
        Ok(cur)
    }
}

impl fmt::Display for MoveWord {
    /// Operator order, rightmost letter applied first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .rev()
            .map(|m| match m {
                Move::S => "S".to_string(),
                Move::T(e) => format!("T^{e}"),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// Checks that the word of `cf` carries the meridian to `±(p', q')`: the
/// bottom row of its `SL(2, Z)` matrix, i.e. `(0, 1) · M`.
pub fn sl2_word_check(cf: &ContinuedFraction, p: i64, q: i64) -> bool {
    let m = MoveWord::from_cfrac(cf).sl2_matrix();
    let row = (m[1][0], m[1][1]);
    row == (p, q) || row == (-p, -q)
}

/// Sparse invariant in the tensor power of annulus/torus spaces; one basis
/// index in `1..r−1` per boundary slot.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorInvariant {
    ctx: CycloContext,
    rank: usize,
    entries: BTreeMap<Vec<usize>, Scalar>,
}

impl TensorInvariant {
    pub fn new(ctx: &CycloContext, rank: usize) -> Self {
        TensorInvariant { ctx: ctx.clone(), rank, entries: BTreeMap::new() }
    }

    /// `Σ_k β_k ⊗ β_k`, the invariant of `A × S¹`.
    pub fn identity(ctx: &CycloContext) -> Self {
        let mut t = Self::new(ctx, 2);
        for k in 1..=ctx.dim() {
            t.entries.insert(vec![k, k], Scalar::one(ctx));
        }
        t
    }

    pub fn context(&self) -> &CycloContext {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize], &Scalar)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn get(&self, index: &[usize]) -> Scalar {
        self.entries.get(index).cloned().unwrap_or_else(|| Scalar::zero(&self.ctx))
    }

    pub fn add_entry(&mut self, index: Vec<usize>, value: Scalar) -> Result<()> {
        if index.len() != self.rank {
            return Err(Error::DimensionMismatch(index.len(), self.rank));
        }
        for &j in &index {
            check_index(&self.ctx, j)?;
        }
        let slot = self.entries.entry(index).or_insert_with(|| Scalar::zero(&self.ctx));
        *slot = slot.try_add(&value)?;
        self.entries.retain(|_, v| !v.is_zero());
        Ok(())
    }

    fn check_slot(&self, slot: usize) -> Result<()> {
        if slot >= self.rank {
            Err(Error::SlotOutOfRange { slot, rank: self.rank })
        } else {
            Ok(())
        }
    }

    pub fn tensor_product(&self, other: &Self) -> Self {
        let mut out = Self::new(&self.ctx, self.rank + other.rank);
        for (a, x) in &self.entries {
            for (b, y) in &other.entries {
                let mut idx = a.clone();
                idx.extend_from_slice(b);
                out.entries.insert(idx, x * y);
            }
        }
        out
    }

    /// Glues two annulus slots: keeps the diagonal `k = k'` and multiplies
    /// by `X/[k]`.
    pub fn glue_annuli(&self, slot_a: usize, slot_b: usize) -> Result<Self> {
        self.check_slot(slot_a)?;
        self.check_slot(slot_b)?;
        if slot_a == slot_b {
            return Err(Error::SlotOutOfRange { slot: slot_b, rank: self.rank });
        }
        let factors: Vec<Scalar> = (1..=self.ctx.dim() as i64)
            .map(|k| Ok(Scalar::new(self.ctx.qint(k).inv()?, 1)))
            .collect::<Result<_>>()?;
        let mut out = Self::new(&self.ctx, self.rank - 2);
        for (idx, v) in &self.entries {
            if idx[slot_a] != idx[slot_b] {
                continue;
            }
            let k = idx[slot_a];
            let rest: Vec<usize> = idx
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != slot_a && *i != slot_b)
                .map(|(_, &j)| j)
                .collect();
            let term = v * &factors[k - 1];
            let e = out.entries.entry(rest).or_insert_with(|| Scalar::zero(&self.ctx));
            *e = e.try_add(&term)?;
        }
        out.entries.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    /// Joins the two annuli of one torus boundary back into a torus slot:
    /// keeps the diagonal and drops `slot_b`.
    pub fn merge_annuli(&self, slot_a: usize, slot_b: usize) -> Result<Self> {
        self.check_slot(slot_a)?;
        self.check_slot(slot_b)?;
        if slot_a == slot_b {
            return Err(Error::SlotOutOfRange { slot: slot_b, rank: self.rank });
        }
        let mut out = Self::new(&self.ctx, self.rank - 1);
        for (idx, v) in &self.entries {
            if idx[slot_a] != idx[slot_b] {
                continue;
            }
            let mut rest = idx.clone();
            rest.remove(slot_b);
            out.entries.insert(rest, v.clone());
        }
        Ok(out)
    }

    /// Changes the basis of one torus slot by an operator.
    pub fn contract_slot(&self, slot: usize, op: &OperatorMatrix) -> Result<Self> {
        self.check_slot(slot)?;
        let mut out = Self::new(&self.ctx, self.rank);
        for (idx, v) in &self.entries {
            let j = idx[slot];
            for i in 1..=self.ctx.dim() {
                let a = op.get(i, j);
                if a.is_zero() {
                    continue;
                }
                let mut new_idx = idx.clone();
                new_idx[slot] = i;
                let e = out.entries.entry(new_idx).or_insert_with(|| Scalar::zero(&self.ctx));
                *e = e.try_add(&(a * v))?;
            }
        }
        out.entries.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    pub fn apply_move_word(&self, slot: usize, word: &MoveWord) -> Result<Self> {
        self.check_slot(slot)?;
        let mut cur = self.clone();
        for m in word.letters() {
            cur = cur.contract_slot(slot, &m.matrix(&self.ctx))?;
        }
        Ok(cur)
    }

    /// Reorders slots: slot `i` of the result is slot `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.rank {
            return Err(Error::DimensionMismatch(order.len(), self.rank));
        }
        for &s in order {
            self.check_slot(s)?;
        }
        let entries = self
            .entries
            .iter()
            .map(|(idx, v)| (order.iter().map(|&s| idx[s]).collect(), v.clone()))
            .collect();
        Ok(TensorInvariant { ctx: self.ctx.clone(), rank: self.rank, entries })
    }
}

impl fmt::Debug for TensorInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter().map(|(k, v)| (k, v.to_string()))).finish()
    }
}

/// `Σ_n ([n]/X) β_n ⊗ β_n ⊗ β_n ⊗ β_n`, the cylinder over an annulus.
pub fn cylinder_annulus_invariant(ctx: &CycloContext) -> TensorInvariant {
    let mut t = TensorInvariant::new(ctx, 4);
    for n in 1..=ctx.dim() {
        t.entries.insert(vec![n; 4], Scalar::new(ctx.qint(n as i64), -1));
    }
    t
}

pub fn glue_annuli(inv: &TensorInvariant, slot_a: usize, slot_b: usize) -> Result<TensorInvariant> {
    inv.glue_annuli(slot_a, slot_b)
}

pub fn apply_move_word(inv: &TensorInvariant, slot: usize, word: &MoveWord) -> Result<TensorInvariant> {
    inv.apply_move_word(slot, word)
}

/// The invariant of the complement of the `(p', q')` torus link, slots
/// `(δ, k, m)`: curve color, inner core, outer core. Multiplied by `X`, its
/// coefficients are the brackets [`bracket_s`].
///
/// Assembled from two copies of `A × S¹` and one cylinder over an annulus
/// using only the tensor gluing rules.
pub fn link_complement_invariant(ctx: &CycloContext, p: i64, q: i64) -> Result<TensorInvariant> {
    let word = MoveWord::for_slope(p, q)?;
    let s_word = MoveWord::new(vec![Move::S]);
    // slots (k, j): exterior torus moved to the (p', q') curve
    let first = TensorInvariant::identity(ctx).apply_move_word(1, &word)?;
    // slots (δ, j'): exterior torus moved to the longitude
    let second = TensorInvariant::identity(ctx).apply_move_word(1, &s_word)?;
    let cylinder = cylinder_annulus_invariant(ctx);
    // (k, j, δ, j', n1, n2, n3, n4)
    let all = first.tensor_product(&second).tensor_product(&cylinder);
    let glued = all.glue_annuli(1, 4)?; // (k, δ, j', n2, n3, n4)
    let glued = glued.glue_annuli(2, 3)?; // (k, δ, n3, n4)
    let torus = glued.merge_annuli(2, 3)?; // (k, δ, j)
    let back = torus.apply_move_word(2, &word.inverse())?.apply_move_word(2, &s_word)?;
    back.permuted(&[1, 0, 2])
}

/// `<S(cp', cq') V^k, V^m>` for a primitive slope, by the matrix chain.
pub fn bracket_s(ctx: &CycloContext, p: i64, q: i64, c: i64, k: i64, m: i64) -> Result<Scalar> {
    let word = MoveWord::for_slope(p, q)?;
    let weights: Vec<Scalar> = (1..=ctx.dim() as i64)
        .map(|j| {
            // [cj]/X from the S move of the colored solid torus, X/[j] from the gluing
            let colored = Scalar::new(ctx.qint(c * j), -1);
            Ok(&colored * &Scalar::new(ctx.qint(j).inv()?, 1))
        })
        .collect::<Result<_>>()?;
    weighted_bracket(ctx, &word, &weights, k, m)
}

fn weighted_bracket(
    ctx: &CycloContext,
    word: &MoveWord,
    weights: &[Scalar],
    k: i64,
    m: i64,
) -> Result<Scalar> {
    let v = word.apply(&TorusVector::color(ctx, k))?;
    let coeffs = v.coeffs().iter().zip(weights).map(|(a, w)| a * w).collect();
    let v = TorusVector::from_coeffs(ctx, coeffs)?;
    let v = word.inverse().apply(&v)?;
    pairing_vectors(&v, &TorusVector::color(ctx, m))
}

/// The operator of the `(p', q')` curve colored by `V^c`, as the conjugate
/// `W⁻¹ diag([cj]/[j]) W` of a meridian operator.
pub fn slope_operator(ctx: &CycloContext, p: i64, q: i64, c: i64) -> Result<OperatorMatrix> {
    let word = MoveWord::for_slope(p, q)?;
    let diag = (1..=ctx.dim() as i64)
        .map(|j| Ok(Scalar::from(ctx.qint(c * j) * ctx.qint(j).inv()?)))
        .collect::<Result<Vec<_>>>()?;
    let d = OperatorMatrix::diagonal(ctx, diag);
    Ok(&(&word.inverse().operator(ctx) * &d) * &word.operator(ctx))
}

/// `<C(p,q) V^k, V^m>` through the pipeline: the difference of the
/// `V^{d+1}` and `V^{d−1}` brackets, with `[(d+1)j]/[j] − [(d−1)j]/[j]`
/// replaced by `t^{2dj} + t^{−2dj}`.
pub fn c_bracket(ctx: &CycloContext, p: i64, q: i64, k: i64, m: i64) -> Result<CycloElement> {
    let slope = SlopeData::new(p, q);
    let Some((pp, qp)) = slope.primitive else {
        let v = pairing(ctx, k, m);
        return Ok(&v + &v);
    };
    let d = slope.d;
    let word = MoveWord::for_slope(pp, qp)?;
    let weights: Vec<Scalar> = (1..=ctx.dim() as i64)
        .map(|j| Scalar::from(ctx.t_power(2 * d * j) + ctx.t_power(-2 * d * j)))
        .collect();
    weighted_bracket(ctx, &word, &weights, k, m)?.into_value()
}

/// Upper bound on the number of terms the literal oracle will visit.
pub const LITERAL_TERM_LIMIT: u128 = 1 << 22;

/// `<S(cp', cq') V^k, V^m>` as the literal sum over `j_1, …, j_{2n+2}`.
///
/// Only uses quantum integers and powers of `t`; exponential in the length
/// of the continued fraction, so refuses more than [`LITERAL_TERM_LIMIT`]
/// terms.
pub fn literal_bracket_s(ctx: &CycloContext, p: i64, q: i64, c: i64, k: i64, m: i64) -> Result<Scalar> {
    let a = slope_expansion(p, q)?;
    let a = a.terms();
    let n = a.len();
    let dim = ctx.dim();
    let slots = 2 * n + 2;
    let terms = (dim as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
    if terms > LITERAL_TERM_LIMIT {
        return Err(Error::OracleTooLarge { terms, limit: LITERAL_TERM_LIMIT });
    }
    let qi = |x: i64| ctx.qint(x);
    let inv: Vec<CycloElement> =
        (1..=dim as i64).map(|j| ctx.qint(j).inv()).collect::<Result<_>>()?;

    // j[0] is j_1, …, j[slots-1] is j_{2n+2}
    let mut j = vec![1i64; slots];
    let mut total = ctx.zero();
    loop {
        let mut term = qi(j[0] * k);
        for i in 0..n {
            term = term * ctx.t_power(-a[i] * (j[i] * j[i] - 1)) * qi(j[i + 1] * j[i]);
        }
        term = term * qi(c * j[n]) * &inv[j[n] as usize - 1];
        for i in n..slots - 1 {
            term = term * qi(j[i + 1] * j[i]);
        }
        // T^{a_l} sits on j_{2n+2−l}
        for (l, &al) in a.iter().enumerate() {
            let idx = slots - 2 - l;
            term = term * ctx.t_power(al * (j[idx] * j[idx] - 1));
        }
        term = term * qi(m * j[slots - 1]);
        total += &term;

        let mut pos = 0;
        loop {
            if pos == slots {
                // 2n+3 factors [..]/X, times X for the bracket normalization
                return Ok(Scalar::new(total, -(2 * n as i64 + 2)));
            }
            if (j[pos] as usize) < dim {
                j[pos] += 1;
                break;
            }
            j[pos] = 1;
            pos += 1;
        }
    }
}

/// Both sides of the Gauss-sum identity
///
/// ```text
/// Σ_{x,y=1}^{r−1} [ax] t^{bx²} [cy] ([x(y+d)] t^{2ey} + [x(y−d)] t^{−2ey})
///   = X² t^{bc²+be²−2de} ([a(c+e)] t^{2(be−d)c} + [a(c−e)] t^{−2(be−d)c}).
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaCheck {
    pub lhs: CycloElement,
    pub rhs: CycloElement,
    pub equal: bool,
}

pub fn lemma_check(ctx: &CycloContext, a: i64, b: i64, c: i64, d: i64, e: i64) -> LemmaCheck {
    let r = ctx.level() as i64;
    let mut lhs = ctx.zero();
    for x in 1..r {
        let outer = ctx.qint(a * x) * ctx.t_power(b * x * x);
        if outer.is_zero() {
            continue;
        }
        let mut inner = ctx.zero();
        for y in 1..r {
            let cy = ctx.qint(c * y);
            if cy.is_zero() {
                continue;
            }
            let bracket = ctx.qint(x * (y + d)) * ctx.t_power(2 * e * y)
                + ctx.qint(x * (y - d)) * ctx.t_power(-2 * e * y);
            inner += &(cy * bracket);
        }
        lhs += &(outer * inner);
    }
    let phase = b * e - d;
    let rhs = ctx.x_squared()
        * ctx.t_power(b * c * c + b * e * e - 2 * d * e)
        * (ctx.qint(a * (c + e)) * ctx.t_power(2 * phase * c)
            + ctx.qint(a * (c - e)) * ctx.t_power(-2 * phase * c));
    let equal = lhs == rhs;
    LemmaCheck { lhs, rhs, equal }
}

/// Parameters `(a, b, c, d, e)` of one application of the Gauss-sum identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LemmaTuple {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub e: i64,
}

/// Memoized lemma checks, keyed by level and tuple.
#[derive(Default, Debug)]
pub struct LemmaLedger {
    seen: HashMap<(u32, LemmaTuple), bool>,
}

impl LemmaLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, ctx: &CycloContext, t: LemmaTuple) -> bool {
        *self
            .seen
            .entry((ctx.level(), t))
            .or_insert_with(|| lemma_check(ctx, t.a, t.b, t.c, t.d, t.e).equal)
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    /// Every recorded `(level, tuple, holds)`, sorted.
    pub fn records(&self) -> Vec<(u32, LemmaTuple, bool)> {
        let mut v: Vec<_> = self.seen.iter().map(|(&(r, t), &ok)| (r, t, ok)).collect();
        v.sort();
        v
    }

    pub fn failures(&self) -> Vec<(u32, LemmaTuple)> {
        self.records().into_iter().filter(|x| !x.2).map(|(r, t, _)| (r, t)).collect()
    }
}

/// The iterated Gauss sum for `<C(p,q) V^k, V^m>`:
///
/// ```text
/// X^{−2n−1} Σ [m j_{2n+2}] [j_{2n+2} j_{2n+1}] t^{a_1 j_{2n+1}²} ⋯ [j_{n+2} j_{n+1}]
///   (t^{2d j_{n+1}} + t^{−2d j_{n+1}}) [j_{n+1} j_n] t^{−a_n j_n²} ⋯ t^{−a_1 j_1²} [j_1 k]
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussSumChain {
    pub cfrac: ContinuedFraction,
    pub d: i64,
    pub k: i64,
    pub m: i64,
}

impl GaussSumChain {
    /// Requires `(p, q) ≠ (0, 0)`.
    pub fn for_cosine(p: i64, q: i64, k: i64, m: i64) -> Result<Self> {
        let slope = SlopeData::new(p, q);
        let (pp, qp) = slope.primitive.ok_or(Error::NotPrimitive(p, q))?;
        Ok(GaussSumChain { cfrac: slope_expansion(pp, qp)?, d: slope.d, k, m })
    }
}

/// Result of collapsing a [`GaussSumChain`].
#[derive(Clone, Debug)]
pub struct Collapse {
    pub value: CycloElement,
    /// Exponent of the accumulated power of `t` (equals `−pq`).
    pub phase: i64,
    /// Final `(D, E)`: the remaining sum carries `[k(x ± D)] t^{±2Ex}`.
    pub shift: (i64, i64),
    /// Distinct lemma tuples used, in order of first use.
    pub steps: Vec<LemmaTuple>,
}

/// Collapses the chain by applying the Gauss-sum identity with
/// `x = j_n, y = j_{n+1}`, then `x = j_{n−1}, y = j_{n+2}`, and so on,
/// checking every instance that arises (every value of the still-summed
/// outer indices). The two sums left at the end are evaluated directly.
pub fn collapse_via_lemma(
    ctx: &CycloContext,
    chain: &GaussSumChain,
    ledger: &mut LemmaLedger,
) -> Result<Collapse> {
    let r = ctx.level() as i64;
    let a = chain.cfrac.terms();
    let n = a.len();
    let (mut dd, mut ee) = (0i64, chain.d);
    let mut phase = 0i64;
    let mut steps = Vec::new();
    for step in 0..n {
        // x = j_{n−step}, weight t^{−a_{n−step} x²}
        let b = -a[n - 1 - step];
        let outer: Vec<i64> = if step + 1 == n { vec![chain.k] } else { (1..r).collect() };
        for &oa in &outer {
            for c in 1..r {
                let t = LemmaTuple { a: oa, b, c, d: dd, e: ee };
                if !ledger.check(ctx, t) {
                    let lc = lemma_check(ctx, t.a, t.b, t.c, t.d, t.e);
                    return Err(Error::VerificationFailed {
                        location: format!("r={} lemma step {} at {:?}", r, step + 1, t),
                        lhs: lc.lhs.to_string(),
                        rhs: lc.rhs.to_string(),
                    });
                }
                if !steps.contains(&t) {
                    steps.push(t);
                }
            }
        }
        // t^{bc²} cancels against T^{a} on the inverse side
        phase += b * ee * ee - 2 * dd * ee;
        (dd, ee) = (ee, b * ee - dd);
    }

    let k = chain.k;
    let m = chain.m;
    let mut sum = ctx.zero();
    for y in 1..r {
        let my = ctx.qint(m * y);
        if my.is_zero() {
            continue;
        }
        for x in 1..r {
            let yx = ctx.qint(y * x);
            let tail = ctx.qint(k * (x + dd)) * ctx.t_power(2 * ee * x)
                + ctx.qint(k * (x - dd)) * ctx.t_power(-2 * ee * x);
            sum += &(&my * &yx * tail);
        }
    }
    // X^{−2n−1} · X^{2n} from the lemma steps · X^{−1} pairing normalization
    let value = ctx.t_power(phase) * ctx.x_squared_inv() * sum;
    Ok(Collapse { value, phase, shift: (dd, ee), steps })
}

/// One row of a lemma scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaScanRow {
    pub level: u32,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub e: i64,
    pub equal: bool,
}

/// Checks the identity on every tuple in `[−bound, bound]⁵`.
pub fn lemma_scan(ctx: &CycloContext, bound: i64) -> Vec<LemmaScanRow> {
    let range = || -bound..=bound;
    let mut rows = Vec::new();
    for a in range() {
        for b in range() {
            for c in range() {
                for d in range() {
                    for e in range() {
                        let equal = lemma_check(ctx, a, b, c, d, e).equal;
                        rows.push(LemmaScanRow { level: ctx.level(), a, b, c, d, e, equal });
                    }
                }
            }
        }
    }
    rows
}
