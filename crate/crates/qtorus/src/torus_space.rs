//! The level-`r` torus space `V(T²)` with basis `V^1(α), …, V^{r−1}(α)`.
//!
//! Colors outside `1..r−1` are reduced to `±` a basis vector or zero.
//! Basis indices are 1-based throughout the public API.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CycloContext, CycloElement, Scalar, ScalarWire};
use crate::error::{Error, Result};

/// A color `V^k` after reduction into the basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReducedColor {
    Zero,
    Basis { sign: i64, index: usize },
}

impl ReducedColor {
    pub fn sign(self) -> i64 {
        match self {
            ReducedColor::Zero => 0,
            ReducedColor::Basis { sign, .. } => sign,
        }
    }

    pub fn index(self) -> Option<usize> {
        match self {
            ReducedColor::Zero => None,
            ReducedColor::Basis { index, .. } => Some(index),
        }
    }
}

/// Closed-form reduction of an arbitrary color `k`.
///
/// `V^k` has period `2r` in `k`, vanishes at `k ≡ 0, r`, and satisfies
/// `V^{2r−k} = −V^k`.
pub fn reduce_color(ctx: &CycloContext, k: i64) -> ReducedColor {
    let r = ctx.level() as i64;
    let k = k.rem_euclid(2 * r);
    if k == 0 || k == r {
        ReducedColor::Zero
    } else if k < r {
        ReducedColor::Basis { sign: 1, index: k as usize }
    } else {
        ReducedColor::Basis { sign: -1, index: (2 * r - k) as usize }
    }
}

/// `V^n(α)` computed by running `V^{n+1} = V² ⊗ V^n − V^{n−1}` away from the
/// seed `V^1, …, V^{r−1}, V^r = 0`.
///
/// Tensoring with `V²` acts by `e_k ↦ e_{k−1} + e_{k+1}`, with `e_0` and
/// `e_r` read as zero; the right end is forced by `V^r = 0`. Kept
/// independent of [`reduce_color`] so it can certify it.
pub fn recursion_oracle(ctx: &CycloContext, n: i64) -> TorusVector {
    let r = ctx.level() as i64;
    let dim = ctx.dim();
    let times_v2 = |x: &[i64]| -> Vec<i64> {
        (0..dim)
            .map(|i| {
                let below = if i > 0 { x[i - 1] } else { 0 };
                let above = if i + 1 < dim { x[i + 1] } else { 0 };
                below + above
            })
            .collect()
    };
    let unit = |k: i64| -> Vec<i64> {
        let mut v = vec![0; dim];
        if (1..r).contains(&k) {
            v[k as usize - 1] = 1;
        }
        v
    };
    let coords = if (1..=r).contains(&n) {
        unit(n)
    } else if n > r {
        let (mut prev, mut cur) = (unit(r - 1), unit(r));
        for _ in r..n {
            let next: Vec<i64> = times_v2(&cur).iter().zip(&prev).map(|(a, b)| a - b).collect();
            prev = std::mem::replace(&mut cur, next);
        }
        cur
    } else {
        let (mut next, mut cur) = (unit(2), unit(1));
        for _ in n..1 {
            let prev: Vec<i64> = times_v2(&cur).iter().zip(&next).map(|(a, b)| a - b).collect();
            next = std::mem::replace(&mut cur, prev);
        }
        cur
    };
    TorusVector {
        ctx: ctx.clone(),
        coeffs: coords.into_iter().map(|c| Scalar::from(CycloElement::from_int(ctx, c))).collect(),
    }
}

/// The torus pairing `<V^k(α), V^m(α)> = [km]` on (reduced) colors.
pub fn pairing(ctx: &CycloContext, k: i64, m: i64) -> CycloElement {
    match (reduce_color(ctx, k), reduce_color(ctx, m)) {
        (
            ReducedColor::Basis { sign: s1, index: i1 },
            ReducedColor::Basis { sign: s2, index: i2 },
        ) => {
            let q = ctx.qint((i1 * i2) as i64);
            if s1 * s2 < 0 {
                -q
            } else {
                q
            }
        }
        _ => ctx.zero(),
    }
}

/// Bilinear extension of [`pairing`].
pub fn pairing_vectors(u: &TorusVector, v: &TorusVector) -> Result<Scalar> {
    let ctx = u.context();
    let mut acc = Scalar::zero(ctx);
    for (i, a) in u.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in v.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let q = Scalar::from(ctx.qint(((i + 1) * (j + 1)) as i64));
            acc = acc.try_add(&(&(a * b) * &q))?;
        }
    }
    Ok(acc)
}

/// Matrix of the `S` move: entry `(m, n)` is `[mn]/X`.
pub fn smove_matrix(ctx: &CycloContext) -> OperatorMatrix {
    OperatorMatrix::from_fn(ctx, |m, n| Scalar::new(ctx.qint((m * n) as i64), -1))
}

/// Matrix of the `T` move, `diag(t^{j²−1})`.
pub fn tmove_matrix(ctx: &CycloContext) -> OperatorMatrix {
    tmove_power(ctx, 1)
}

/// `T^a = diag(t^{a(j²−1)})`.
pub fn tmove_power(ctx: &CycloContext, a: i64) -> OperatorMatrix {
    let diag = (1..=ctx.dim() as i64).map(|j| Scalar::from(ctx.t_power(a * (j * j - 1))));
    OperatorMatrix::diagonal(ctx, diag)
}

/// Pairing of annulus basis vectors, `<β_j, β_k> = δ_{jk} X/[j]`.
pub fn annulus_pairing(ctx: &CycloContext, j: usize, k: usize) -> Result<Scalar> {
    check_index(ctx, j)?;
    check_index(ctx, k)?;
    if j != k {
        return Ok(Scalar::zero(ctx));
    }
    Ok(Scalar::new(ctx.qint(j as i64).inv()?, 1))
}

pub(crate) fn check_index(ctx: &CycloContext, j: usize) -> Result<()> {
    if j == 0 || j > ctx.dim() {
        Err(Error::IndexOutOfRange { index: j as i64, max: ctx.dim() as i64 })
    } else {
        Ok(())
    }
}

/// A vector of `V(T²)` in the basis `V^1(α), …, V^{r−1}(α)`.
#[derive(Clone, PartialEq, Eq)]
pub struct TorusVector {
    ctx: CycloContext,
    coeffs: Vec<Scalar>,
}

impl TorusVector {
    pub fn zero(ctx: &CycloContext) -> Self {
        TorusVector { ctx: ctx.clone(), coeffs: vec![Scalar::zero(ctx); ctx.dim()] }
    }

    /// `V^j(α)` for `1 <= j <= r − 1`.
    pub fn basis(ctx: &CycloContext, j: usize) -> Result<Self> {
        check_index(ctx, j)?;
        let mut v = Self::zero(ctx);
        v.coeffs[j - 1] = Scalar::one(ctx);
        Ok(v)
    }

    /// `V^k(α)` for any integer `k`, through [`reduce_color`].
    pub fn color(ctx: &CycloContext, k: i64) -> Self {
        let mut v = Self::zero(ctx);
        if let ReducedColor::Basis { sign, index } = reduce_color(ctx, k) {
            v.coeffs[index - 1] = Scalar::from(CycloElement::from_int(ctx, sign));
        }
        v
    }

    pub fn from_coeffs(ctx: &CycloContext, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.len() != ctx.dim() {
            return Err(Error::DimensionMismatch(coeffs.len(), ctx.dim()));
        }
        Ok(TorusVector { ctx: ctx.clone(), coeffs })
    }

    pub fn context(&self) -> &CycloContext {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `V^j(α)`, 1-based.
    pub fn get(&self, j: usize) -> &Scalar {
        &self.coeffs[j - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_>>()?;
        Ok(TorusVector { ctx: self.ctx.clone(), coeffs })
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        TorusVector { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Adds `s · V^k(α)` for an arbitrary color `k`.
    pub fn add_color(&mut self, k: i64, s: &Scalar) -> Result<()> {
        if let ReducedColor::Basis { sign, index } = reduce_color(&self.ctx, k) {
            let term = if sign < 0 { -s } else { s.clone() };
            self.coeffs[index - 1] = self.coeffs[index - 1].try_add(&term)?;
        }
        Ok(())
    }
}

impl fmt::Debug for TorusVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter().map(|c| c.to_string())).finish()
    }
}

/// An endomorphism of `V(T²)`; column `j` is the image of `V^j(α)`.
#[derive(Clone, PartialEq, Eq)]
pub struct OperatorMatrix {
    ctx: CycloContext,
    dim: usize,
    entries: Vec<Scalar>,
}

impl OperatorMatrix {
    pub fn zero(ctx: &CycloContext) -> Self {
        let dim = ctx.dim();
        OperatorMatrix { ctx: ctx.clone(), dim, entries: vec![Scalar::zero(ctx); dim * dim] }
    }

    pub fn identity(ctx: &CycloContext) -> Self {
        Self::diagonal(ctx, std::iter::repeat_n(Scalar::one(ctx), ctx.dim()))
    }

    pub fn diagonal(ctx: &CycloContext, diag: impl IntoIterator<Item = Scalar>) -> Self {
        let mut m = Self::zero(ctx);
        for (i, d) in diag.into_iter().enumerate().take(m.dim) {
            m.entries[i * m.dim + i] = d;
        }
        m
    }

    /// Builds the matrix from a function of 1-based `(row, col)`.
    pub fn from_fn(ctx: &CycloContext, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let dim = ctx.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 1..=dim {
            for j in 1..=dim {
                entries.push(f(i, j));
            }
        }
        OperatorMatrix { ctx: ctx.clone(), dim, entries }
    }

    /// The matrix whose columns are the given vectors.
    pub fn from_columns(ctx: &CycloContext, cols: &[TorusVector]) -> Result<Self> {
        if cols.len() != ctx.dim() {
            return Err(Error::DimensionMismatch(cols.len(), ctx.dim()));
        }
        Ok(Self::from_fn(ctx, |i, j| cols[j - 1].coeffs[i - 1].clone()))
    }

    pub fn context(&self) -> &CycloContext {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at 1-based `(row, col)`.
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[(i - 1) * self.dim + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        self.entries[(i - 1) * self.dim + (j - 1)] = s;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> TorusVector {
        TorusVector {
            ctx: self.ctx.clone(),
            coeffs: (1..=self.dim).map(|i| self.get(i, j).clone()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        let n = self.dim;
        let mut out = vec![Scalar::zero(&self.ctx); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.entries[k * n + j];
                    if b.is_zero() {
                        continue;
                    }
                    out[i * n + j] = out[i * n + j].try_add(&(a * b))?;
                }
            }
        }
        Ok(OperatorMatrix { ctx: self.ctx.clone(), dim: n, entries: out })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_>>()?;
        Ok(OperatorMatrix { ctx: self.ctx.clone(), dim: self.dim, entries })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.try_add(&rhs.scale(&-Scalar::one(&self.ctx)))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        OperatorMatrix {
            ctx: self.ctx.clone(),
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn apply(&self, v: &TorusVector) -> Result<TorusVector> {
        let n = self.dim;
        let mut out = vec![Scalar::zero(&self.ctx); n];
        for (j, x) in v.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = &self.entries[i * n + j];
                if !a.is_zero() {
                    *o = o.try_add(&(a * x))?;
                }
            }
        }
        Ok(TorusVector { ctx: self.ctx.clone(), coeffs: out })
    }

    /// First 1-based `(row, col)` where the two matrices disagree.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .zip(&other.entries)
            .position(|(a, b)| a != b)
            .map(|p| (p / self.dim + 1, p % self.dim + 1))
    }

    pub fn to_wire(&self) -> MatrixWire {
        MatrixWire {
            level: self.ctx.level(),
            rows: self.dim,
            entries: self
                .entries
                .chunks(self.dim)
                .map(|row| row.iter().map(Scalar::to_wire).collect())
                .collect(),
        }
    }

    pub fn from_wire(wire: &MatrixWire) -> Result<Self> {
        let ctx = CycloContext::new(wire.level as i64)?;
        if wire.rows != ctx.dim() || wire.entries.len() != wire.rows {
            return Err(Error::Malformed(format!("expected {} rows", ctx.dim())));
        }
        let mut entries = Vec::with_capacity(wire.rows * wire.rows);
        for row in &wire.entries {
            if row.len() != wire.rows {
                return Err(Error::Malformed(format!("expected {} columns", wire.rows)));
            }
            for e in row {
                let s = Scalar::from_wire(e)?;
                if s.context() != &ctx {
                    return Err(Error::LevelMismatch(s.context().level(), ctx.level()));
                }
                entries.push(s);
            }
        }
        Ok(OperatorMatrix { ctx, dim: wire.rows, entries })
    }
}

impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    /// # Panics
    /// On an X-grading mismatch; see [`OperatorMatrix::try_mul`].
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Sub<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .entries
            .chunks(self.dim)
            .map(|r| r.iter().map(|e| e.to_string()).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

/// Serialized form of an [`OperatorMatrix`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixWire {
    pub level: u32,
    pub rows: usize,
    pub entries: Vec<Vec<ScalarWire>>,
}

impl Serialize for OperatorMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_wire().serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(d)?;
        OperatorMatrix::from_wire(&wire).map_err(serde::de::Error::custom)
    }
}
