//! Exact arithmetic in the cyclotomic field `Q(t)`, `t = exp(iπ/2r)`.
//!
//! Elements are stored as their unique remainder modulo the `4r`-th
//! cyclotomic polynomial, so two elements are equal exactly when their
//! coefficient vectors are. Quantum integers `[n]` and the normalization
//! `X² = Σ [j]²` live here, together with [`Scalar`], which adjoins the
//! irrational `X` as a parity grading.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Integer polynomial, lowest degree first.
pub type IntPoly = Vec<i64>;

fn poly_mul(a: &[i64], b: &[i64]) -> IntPoly {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division by a monic divisor. Panics if the division leaves a
/// remainder.
fn poly_div_exact(num: &[i64], den: &[i64]) -> IntPoly {
    let dn = den.len() - 1;
    assert_eq!(den[dn], 1, "divisor must be monic");
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "inexact polynomial division");
    quot
}

fn mobius(mut n: u64) -> i64 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn x_pow_minus_one(d: u64) -> IntPoly {
    let mut p = vec![0i64; d as usize + 1];
    p[0] = -1;
    p[d as usize] = 1;
    p
}

/// The `n`-th cyclotomic polynomial `Φ_n`, lowest coefficient first.
///
/// Computed from the Möbius product `Φ_n = Π_{d|n} (x^d − 1)^{μ(n/d)}`:
/// the factors with `μ = 1` are multiplied out and the ones with `μ = −1`
/// divided off exactly.
///
/// # Panics
/// If `n == 0`.
pub fn cyclotomic_polynomial(n: u64) -> IntPoly {
    assert!(n >= 1, "cyclotomic polynomial index must be positive");
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut num: IntPoly = vec![1];
    let mut dens = Vec::new();
    for &d in &divisors {
        match mobius(n / d) {
            1 => num = poly_mul(&num, &x_pow_minus_one(d)),
            -1 => dens.push(d),
            _ => {}
        }
    }
    for d in dens {
        num = poly_div_exact(&num, &x_pow_minus_one(d));
    }
    num
}

fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

struct ContextInner {
    level: u32,
    order: u32,
    modulus: IntPoly,
    degree: usize,
    /// `x^e mod Φ` for `0 <= e < order`.
    powers: Vec<IntPoly>,
    x_squared: Vec<Rational>,
    x_squared_inv: Vec<Rational>,
    zeta: Complex64,
}

/// Shared description of the field `Q(ζ_{4r})` at level `r`.
///
/// Cloning is cheap. Contexts for the same level are interned, and two
/// contexts compare equal iff their levels agree.
#[derive(Clone)]
pub struct CycloContext(Arc<ContextInner>);

impl CycloContext {
    pub fn new(level: i64) -> Result<Self> {
        if level < 3 || level > u32::MAX as i64 / 4 {
            return Err(Error::InvalidLevel(level));
        }
        static CACHE: OnceLock<Mutex<HashMap<u32, CycloContext>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        let ctx = guard
            .entry(level as u32)
            .or_insert_with(|| CycloContext::build(level as u32))
            .clone();
        Ok(ctx)
    }

    fn build(level: u32) -> Self {
        let order = 4 * level;
        let modulus = cyclotomic_polynomial(order as u64);
        let degree = modulus.len() - 1;
        debug_assert_eq!(degree as u64, euler_phi(order as u64));

        let mut powers = Vec::with_capacity(order as usize);
        let mut cur = vec![0i64; degree];
        cur[0] = 1;
        for _ in 0..order {
            powers.push(cur.clone());
            // multiply by x, folding x^degree = −Σ φ_i x^i
            let top = cur[degree - 1];
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..degree {
                    cur[i] -= top * modulus[i];
                }
            }
        }

        let mut inner = ContextInner {
            level,
            order,
            modulus,
            degree,
            powers,
            x_squared: Vec::new(),
            x_squared_inv: Vec::new(),
            zeta: Complex64::from_polar(1.0, std::f64::consts::PI / (2.0 * level as f64)),
        };
        let mut xsq = vec![Rational::ZERO; degree];
        for j in 1..level as i64 {
            let q = qint_raw(&inner, j);
            let sq = mul_raw(&inner, &q, &q);
            for (a, b) in xsq.iter_mut().zip(&sq) {
                *a += b;
            }
        }
        inner.x_squared_inv = inv_raw(&inner, &xsq).expect("X² is nonzero");
        inner.x_squared = xsq;
        CycloContext(Arc::new(inner))
    }

    pub fn level(&self) -> u32 {
        self.0.level
    }

    /// `4r`, the order of `t`.
    pub fn order(&self) -> u32 {
        self.0.order
    }

    /// Degree of the field, `φ(4r)`.
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn modulus(&self) -> &[i64] {
        &self.0.modulus
    }

    /// Number of basis vectors of the torus space, `r − 1`.
    pub fn dim(&self) -> usize {
        self.0.level as usize - 1
    }

    pub fn zeta(&self) -> Complex64 {
        self.0.zeta
    }

    fn same(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.level == other.0.level
    }

    pub fn zero(&self) -> CycloElement {
        CycloElement::zero(self)
    }

    pub fn one(&self) -> CycloElement {
        CycloElement::one(self)
    }

    pub fn t_power(&self, e: i64) -> CycloElement {
        CycloElement::t_power(self, e)
    }

    pub fn qint(&self, n: i64) -> CycloElement {
        CycloElement::qint(self, n)
    }

    pub fn x_squared(&self) -> CycloElement {
        CycloElement { ctx: self.clone(), coeffs: self.0.x_squared.clone() }
    }

    pub fn x_squared_inv(&self) -> CycloElement {
        CycloElement { ctx: self.clone(), coeffs: self.0.x_squared_inv.clone() }
    }

    /// Numeric value of `X`.
    pub fn x_value(&self) -> f64 {
        self.x_squared().to_complex().re.sqrt()
    }
}

impl PartialEq for CycloContext {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl Eq for CycloContext {}

impl fmt::Debug for CycloContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloContext(r={})", self.0.level)
    }
}

fn mul_raw(ctx: &ContextInner, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = ctx.degree;
    let mut prod = vec![Rational::ZERO; 2 * n - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            prod[i + j] += &(x * y);
        }
    }
    let mut out: Vec<Rational> = prod.drain(..n).collect();
    for (k, c) in prod.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (o, p) in out.iter_mut().zip(&ctx.powers[n + k]) {
            if *p != 0 {
                *o += &(c * &Rational::from_int(*p));
            }
        }
    }
    out
}

/// Solves `a · y = 1` by Gaussian elimination on the multiplication matrix.
fn inv_raw(ctx: &ContextInner, a: &[Rational]) -> Option<Vec<Rational>> {
    let n = ctx.degree;
    if a.iter().all(Rational::is_zero) {
        return None;
    }
    // column i of the matrix is a·x^i
    let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut xi = vec![Rational::ZERO; n];
        xi[i] = Rational::ONE;
        cols.push(mul_raw(ctx, a, &xi));
    }
    // augmented rows [M | e_0]
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(|r| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(if r == 0 { Rational::ONE } else { Rational::ZERO });
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, piv);
        let inv = rows[col][col].recip()?;
        for x in rows[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &(&f * p);
                }
            }
        }
    }
    Some(rows.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Reduces a vector of multiplicities indexed by exponent mod `4r`.
fn from_exponent_counts(ctx: &ContextInner, counts: &[i64]) -> Vec<Rational> {
    let mut acc = vec![0i128; ctx.degree];
    for (e, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (a, p) in acc.iter_mut().zip(&ctx.powers[e]) {
            *a += c as i128 * *p as i128;
        }
    }
    acc.into_iter()
        .map(|c| match i64::try_from(c) {
            Ok(c) => Rational::from_int(c),
            Err(_) => Rational::from_bigints(BigInt::from(c), BigInt::from(1)),
        })
        .collect()
}

fn qint_raw(ctx: &ContextInner, n: i64) -> Vec<Rational> {
    if n == 0 {
        return vec![Rational::ZERO; ctx.degree];
    }
    let order = ctx.order as i64;
    let (m, sign) = if n > 0 { (n, 1) } else { (-n, -1) };
    // [m] = Σ_{j=0}^{m-1} t^{2(m-1-2j)}
    let mut counts = vec![0i64; order as usize];
    for j in 0..m {
        let e = (2 * (m - 1 - 2 * j)).rem_euclid(order);
        counts[e as usize] += sign;
    }
    from_exponent_counts(ctx, &counts)
}

/// An element of `Q(ζ_{4r})` in canonical form.
#[derive(Clone)]
pub struct CycloElement {
    ctx: CycloContext,
    coeffs: Vec<Rational>,
}

impl CycloElement {
    pub fn zero(ctx: &CycloContext) -> Self {
        CycloElement { ctx: ctx.clone(), coeffs: vec![Rational::ZERO; ctx.degree()] }
    }

    pub fn one(ctx: &CycloContext) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &CycloContext, n: i64) -> Self {
        Self::from_rational(ctx, Rational::from_int(n))
    }

    pub fn from_rational(ctx: &CycloContext, q: Rational) -> Self {
        let mut e = Self::zero(ctx);
        e.coeffs[0] = q;
        e
    }

    /// Reduces an arbitrary polynomial in `t` (lowest degree first).
    pub fn from_poly(ctx: &CycloContext, poly: &[Rational]) -> Self {
        let order = ctx.order() as usize;
        let mut out = vec![Rational::ZERO; ctx.degree()];
        for (e, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&ctx.0.powers[e % order]) {
                if *p != 0 {
                    *o += &(c * &Rational::from_int(*p));
                }
            }
        }
        CycloElement { ctx: ctx.clone(), coeffs: out }
    }

    /// `t^e`, for any integer `e`.
    pub fn t_power(ctx: &CycloContext, e: i64) -> Self {
        let idx = e.rem_euclid(ctx.order() as i64) as usize;
        let coeffs = ctx.0.powers[idx].iter().map(|&c| Rational::from_int(c)).collect();
        CycloElement { ctx: ctx.clone(), coeffs }
    }

    /// The quantum integer `[n] = (t^{2n} − t^{−2n}) / (t² − t^{−2})`,
    /// evaluated without division as `Σ_{j<n} t^{2(n−1−2j)}`.
    pub fn qint(ctx: &CycloContext, n: i64) -> Self {
        CycloElement { ctx: ctx.clone(), coeffs: qint_raw(&ctx.0, n) }
    }

    pub fn context(&self) -> &CycloContext {
        &self.ctx
    }

    pub fn level(&self) -> u32 {
        self.ctx.level()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Rational::is_zero)
    }

    /// Returns the rational number this element equals, if it is one.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.coeffs[1..].iter().all(Rational::is_zero).then(|| &self.coeffs[0])
    }

    pub fn inv(&self) -> Result<Self> {
        let coeffs = inv_raw(&self.ctx.0, &self.coeffs).ok_or(Error::DivisionByZero)?;
        Ok(CycloElement { ctx: self.ctx.clone(), coeffs })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * q).collect();
        CycloElement { ctx: self.ctx.clone(), coeffs }
    }

    /// Numeric value at `t = exp(iπ/2r)`.
    pub fn to_complex(&self) -> Complex64 {
        let z = self.ctx.zeta();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_f64();
        }
        acc
    }

    fn check_level(&self, other: &Self) {
        assert!(
            self.ctx.same(&other.ctx),
            "{}",
            Error::LevelMismatch(self.level(), other.level())
        );
    }

    pub fn to_wire(&self) -> CycloWire {
        let z = self.to_complex();
        CycloWire {
            order: self.ctx.order(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| [WireInt::from_bigint(c.numer()), WireInt::from_bigint(c.denom())])
                .collect(),
            approx: [z.re, z.im],
        }
    }

    pub fn from_wire(wire: &CycloWire) -> Result<Self> {
        if !wire.order.is_multiple_of(4) {
            return Err(Error::Malformed(format!("order {} is not a multiple of 4", wire.order)));
        }
        let ctx = CycloContext::new(wire.order as i64 / 4)?;
        if wire.coeffs.len() != ctx.degree() {
            return Err(Error::Malformed(format!(
                "expected {} coefficients, got {}",
                ctx.degree(),
                wire.coeffs.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(ctx.degree());
        for [n, d] in &wire.coeffs {
            let (n, d) = (n.to_bigint()?, d.to_bigint()?);
            if d == BigInt::from(0) {
                return Err(Error::Malformed("zero denominator".into()));
            }
            coeffs.push(Rational::from_bigints(n, d));
        }
        Ok(CycloElement { ctx, coeffs })
    }
}

impl PartialEq for CycloElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.coeffs == other.coeffs
    }
}

impl Eq for CycloElement {}

impl Hash for CycloElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.level().hash(state);
        self.coeffs.hash(state);
    }
}

impl<'a> Add<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn add(self, rhs: &CycloElement) -> CycloElement {
        self.check_level(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        CycloElement { ctx: self.ctx.clone(), coeffs }
    }
}

impl<'a> Sub<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn sub(self, rhs: &CycloElement) -> CycloElement {
        self.check_level(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        CycloElement { ctx: self.ctx.clone(), coeffs }
    }
}

impl<'a> Mul<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn mul(self, rhs: &CycloElement) -> CycloElement {
        self.check_level(rhs);
        CycloElement { ctx: self.ctx.clone(), coeffs: mul_raw(&self.ctx.0, &self.coeffs, &rhs.coeffs) }
    }
}

impl Neg for &CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        CycloElement { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        -&self
    }
}

macro_rules! forward_owned {
    ($ty:ty, $tr:ident, $m:ident) => {
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a $ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<$ty> for &'a $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(CycloElement, Add, add);
forward_owned!(CycloElement, Sub, sub);
forward_owned!(CycloElement, Mul, mul);

impl AddAssign<&CycloElement> for CycloElement {
    fn add_assign(&mut self, rhs: &CycloElement) {
        self.check_level(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&CycloElement> for CycloElement {
    fn sub_assign(&mut self, rhs: &CycloElement) {
        self.check_level(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl MulAssign<&CycloElement> for CycloElement {
    fn mul_assign(&mut self, rhs: &CycloElement) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for CycloElement {
    /// Writes the canonical polynomial in `t`, highest power first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.signum() < 0;
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match e {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{e}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[r={}] {}", self.level(), self)
    }
}

/// An element of the field extended by the irrational `X`, kept in the
/// canonical form `value · X^xpow` with `xpow ∈ {0, 1}`.
#[derive(Clone)]
pub struct Scalar {
    value: CycloElement,
    xpow: i64,
}

impl Scalar {
    /// `value · X^xpow`, folding even powers of `X` into `value`.
    pub fn new(value: CycloElement, xpow: i64) -> Self {
        let parity = xpow.rem_euclid(2);
        let half = (xpow - parity) / 2;
        let value = match half {
            0 => value,
            h if h > 0 => {
                let f = pow_raw(&value.ctx, &value.ctx.x_squared(), h as u64);
                &value * &f
            }
            h => {
                let f = pow_raw(&value.ctx, &value.ctx.x_squared_inv(), h.unsigned_abs());
                &value * &f
            }
        };
        Scalar { value, xpow: parity }
    }

    pub fn zero(ctx: &CycloContext) -> Self {
        Scalar { value: CycloElement::zero(ctx), xpow: 0 }
    }

    pub fn one(ctx: &CycloContext) -> Self {
        Scalar { value: CycloElement::one(ctx), xpow: 0 }
    }

    /// The symbol `X` itself.
    pub fn x(ctx: &CycloContext) -> Self {
        Scalar { value: CycloElement::one(ctx), xpow: 1 }
    }

    pub fn value(&self) -> &CycloElement {
        &self.value
    }

    pub fn xpow(&self) -> i64 {
        self.xpow
    }

    pub fn context(&self) -> &CycloContext {
        &self.value.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// The field element, provided the X-grading cancelled.
    pub fn into_value(self) -> Result<CycloElement> {
        if self.xpow == 0 || self.is_zero() {
            Ok(self.value)
        } else {
            Err(Error::GradingNotCanceled(self.xpow))
        }
    }

    pub fn try_add(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if self.xpow != rhs.xpow {
            return Err(Error::GradingMismatch(self.xpow, rhs.xpow));
        }
        Ok(Scalar { value: &self.value + &rhs.value, xpow: self.xpow })
    }

    pub fn try_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        self.try_add(&-rhs)
    }

    pub fn inv(&self) -> Result<Scalar> {
        Ok(Scalar::new(self.value.inv()?, -self.xpow))
    }

    pub fn to_complex(&self) -> Complex64 {
        let v = self.value.to_complex();
        if self.xpow == 1 {
            v * self.value.ctx.x_value()
        } else {
            v
        }
    }

    pub fn to_wire(&self) -> ScalarWire {
        let z = self.to_complex();
        ScalarWire { value: self.value.to_wire(), xpow: self.xpow, approx: [z.re, z.im] }
    }

    pub fn from_wire(wire: &ScalarWire) -> Result<Self> {
        Ok(Scalar::new(CycloElement::from_wire(&wire.value)?, wire.xpow))
    }
}

fn pow_raw(ctx: &CycloContext, base: &CycloElement, mut e: u64) -> CycloElement {
    let mut acc = CycloElement::one(ctx);
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

impl From<CycloElement> for Scalar {
    fn from(value: CycloElement) -> Self {
        Scalar { value, xpow: 0 }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.is_zero() && other.is_zero() {
            return self.value.ctx.same(&other.value.ctx);
        }
        self.xpow == other.xpow && self.value == other.value
    }
}

impl Eq for Scalar {}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let value = &self.value * &rhs.value;
        if self.xpow + rhs.xpow == 2 {
            Scalar { value: &value * &self.value.ctx.x_squared(), xpow: 0 }
        } else {
            Scalar { value, xpow: self.xpow + rhs.xpow }
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// # Panics
    /// On an X-parity mismatch between two nonzero operands; use
    /// [`Scalar::try_add`] to get an error instead.
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { value: -&self.value, xpow: self.xpow }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

forward_owned!(Scalar, Add, add);
forward_owned!(Scalar, Sub, sub);
forward_owned!(Scalar, Mul, mul);

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.xpow == 0 || self.is_zero() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "({})*X", self.value)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[r={}] {}", self.value.level(), self)
    }
}

/// JSON integer that falls back to a decimal string outside the `i64` range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireInt {
    Int(i64),
    Str(String),
}

impl WireInt {
    fn from_bigint(b: BigInt) -> Self {
        match i64::try_from(&b) {
            Ok(n) => WireInt::Int(n),
            Err(_) => WireInt::Str(b.to_string()),
        }
    }

    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            WireInt::Int(n) => Ok(BigInt::from(*n)),
            WireInt::Str(s) => s.parse().map_err(|_| Error::Malformed(format!("bad integer {s:?}"))),
        }
    }
}

/// Serialized form of a [`CycloElement`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycloWire {
    pub order: u32,
    pub coeffs: Vec<[WireInt; 2]>,
    pub approx: [f64; 2],
}

/// Serialized form of a [`Scalar`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarWire {
    pub value: CycloWire,
    pub xpow: i64,
    pub approx: [f64; 2],
}

impl Serialize for CycloElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_wire().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = CycloWire::deserialize(d)?;
        CycloElement::from_wire(&wire).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_wire().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = ScalarWire::deserialize(d)?;
        Scalar::from_wire(&wire).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ctx(r: i64) -> CycloContext {
        CycloContext::new(r).unwrap()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn divisor_product_is_x_n_minus_one() {
        for n in 1..=40u64 {
            let mut prod: IntPoly = vec![1];
            for d in (1..=n).filter(|d| n % d == 0) {
                prod = poly_mul(&prod, &cyclotomic_polynomial(d));
            }
            assert_eq!(prod, x_pow_minus_one(n), "n = {n}");
            assert_eq!(cyclotomic_polynomial(n).len() as u64 - 1, euler_phi(n));
        }
    }

    #[test]
    fn rejects_small_levels() {
        assert_eq!(CycloContext::new(2).unwrap_err(), Error::InvalidLevel(2));
        assert!(CycloContext::new(3).is_ok());
    }

    #[test]
    fn t_powers() {
        let c = ctx(3);
        assert!(c.t_power(12).is_one());
        assert_eq!(c.t_power(6), CycloElement::from_int(&c, -1));
        assert_eq!(c.t_power(1).coeffs()[1], Rational::ONE);
        assert_eq!(c.t_power(-1), c.t_power(11));
    }

    #[test]
    fn quantum_integers() {
        for r in 3..=9 {
            let c = ctx(r);
            assert!(c.qint(1).is_one());
            assert_eq!(c.qint(2), c.t_power(2) + c.t_power(-2));
            assert!(c.qint(r).is_zero(), "[r] vanishes at r = {r}");
            assert!(c.qint(0).is_zero());
            assert_eq!(c.qint(-5), -c.qint(5));
        }
    }

    #[test]
    fn x_squared_small_levels() {
        assert_eq!(ctx(3).x_squared(), CycloElement::from_int(&ctx(3), 2));
        assert_eq!(ctx(4).x_squared(), CycloElement::from_int(&ctx(4), 4));
        for r in 3..=12 {
            let s = (PI / r as f64).sin();
            let expect = (r as f64 / 2.0) / (s * s);
            let got = ctx(r).x_squared().to_complex();
            assert!((got.re - expect).abs() < 1e-9 && got.im.abs() < 1e-9, "r = {r}");
        }
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let c = ctx(5);
        assert_eq!(c.zero().inv().unwrap_err(), Error::DivisionByZero);
        assert_eq!(c.qint(5).inv().unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn inverse_of_quantum_denominator() {
        for r in 3..=8 {
            let c = ctx(r);
            let d = c.t_power(2) - c.t_power(-2);
            assert!((d.inv().unwrap() * &d).is_one());
        }
    }

    #[test]
    fn scalar_grading_rules() {
        let c = ctx(5);
        let a = Scalar::new(c.qint(2), 1);
        let b = Scalar::new(c.t_power(3), 1);
        let p = &a * &b;
        assert_eq!(p.xpow(), 0);
        assert_eq!(p.value(), &(c.qint(2) * c.t_power(3) * c.x_squared()));

        assert_eq!(Scalar::new(c.zero(), 1), Scalar::zero(&c));
        assert_eq!(
            Scalar::new(c.one(), -1),
            Scalar::new(c.x_squared_inv(), 1),
        );
        assert_eq!(Scalar::new(c.one(), 4).value(), &(c.x_squared() * c.x_squared()));
        assert_eq!(
            a.try_add(&Scalar::one(&c)).unwrap_err(),
            Error::GradingMismatch(1, 0)
        );
        assert_eq!(a.try_add(&Scalar::zero(&c)).unwrap(), a);
        assert_eq!((&a * &a.inv().unwrap()), Scalar::one(&c));
        assert_eq!(Scalar::new(c.one(), 3).into_value().unwrap_err(), Error::GradingNotCanceled(1));
    }

    #[test]
    fn numeric_shadow_of_quantum_integers() {
        for r in 3..=12i64 {
            let c = ctx(r);
            let s1 = (PI / r as f64).sin();
            for n in -3 * r..=3 * r {
                let expect = (n as f64 * PI / r as f64).sin() / s1;
                let z = c.qint(n).to_complex();
                assert!((z.re - expect).abs() < 1e-9 && z.im.abs() < 1e-9, "r={r} n={n}");
            }
            for e in -20..20 {
                let z = c.t_power(e).to_complex();
                let w = Complex64::from_polar(1.0, PI * e as f64 / (2.0 * r as f64));
                assert!((z - w).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sine_orthogonality() {
        for r in 3..=8 {
            let c = ctx(r);
            for k in 1..r {
                for m in 1..r {
                    let mut acc = c.zero();
                    for j in 1..r {
                        acc += &(c.qint(k * j) * c.qint(j * m));
                    }
                    let expect = if k == m { c.x_squared() } else { c.zero() };
                    assert_eq!(acc, expect, "r={r} k={k} m={m}");
                }
            }
        }
    }

    #[test]
    fn display_and_wire_format() {
        let c = ctx(3);
        let e = c.t_power(1).scale(&Rational::new(-1, 2)) + c.int_helper(3);
        assert_eq!(e.to_string(), "-1/2*t + 3");
        let json = serde_json::to_value(&e).unwrap();
        assert_eq!(json["order"], 12);
        assert_eq!(json["coeffs"], serde_json::json!([[3, 1], [-1, 2], [0, 1], [0, 1]]));
        let back: CycloElement = serde_json::from_value(json).unwrap();
        assert_eq!(back, e);

        let big = c.one().scale(&(Rational::from_int(i64::MAX) * Rational::from_int(4)));
        let json = serde_json::to_string(&big).unwrap();
        assert!(json.contains("\"36893488147419103228\""));
        assert_eq!(serde_json::from_str::<CycloElement>(&json).unwrap(), big);

        let s = Scalar::new(c.qint(2), -1);
        let back: Scalar = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    impl CycloContext {
        fn int_helper(&self, n: i64) -> CycloElement {
            CycloElement::from_int(self, n)
        }
    }

    proptest! {
        #[test]
        fn qint_periodicity(r in 3i64..=10, n in -60i64..60) {
            let c = ctx(r);
            prop_assert_eq!(c.qint(n + 2 * r), c.qint(n));
            prop_assert_eq!(c.qint(2 * r - n), -c.qint(n));
        }

        #[test]
        fn t_power_inverses(r in 3i64..=10, e in -200i64..200) {
            let c = ctx(r);
            prop_assert!((c.t_power(e) * c.t_power(-e)).is_one());
        }

        #[test]
        fn field_inverse(r in 3i64..=8, coeffs in proptest::collection::vec(-5i64..5, 1..12)) {
            let c = ctx(r);
            let poly: Vec<Rational> = coeffs.iter().map(|&x| Rational::from_int(x)).collect();
            let a = CycloElement::from_poly(&c, &poly);
            if a.is_zero() {
                prop_assert!(a.inv().is_err());
            } else {
                prop_assert!((a.inv().unwrap() * &a).is_one());
                let z = a.to_complex();
                let direct: Complex64 = coeffs.iter().enumerate()
                    .map(|(i, &x)| c.zeta().powi(i as i32) * x as f64).sum();
                prop_assert!((z - direct).norm() < 1e-9);
            }
        }
    }
}
