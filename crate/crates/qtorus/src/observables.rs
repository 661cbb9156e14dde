//! The quantized cosines `C(p,q)` and sine ratios `S(p,q)` as operators on
//! `V(T²)`, the closed form of their action, and the product-to-sum rule.

use num_integer::Integer;
use serde::Serialize;

use crate::cyclotomic::{CycloContext, CycloElement, Scalar};
use crate::error::{Error, Result};
use crate::torus_space::{MatrixWire, OperatorMatrix, TorusVector};

/// `(p, q) = d · (p', q')` with `d = gcd(|p|, |q|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlopeData {
    pub p: i64,
    pub q: i64,
    pub d: i64,
    /// `(p', q')`; `None` for `(0, 0)`.
    pub primitive: Option<(i64, i64)>,
}

impl SlopeData {
    pub fn new(p: i64, q: i64) -> Self {
        let d = p.gcd(&q);
        let primitive = (d != 0).then(|| (p / d, q / d));
        SlopeData { p, q, d, primitive }
    }
}

/// `C(p,q) V^k = t^{−pq} (t^{2qk} V^{k−p} + t^{−2qk} V^{k+p})`.
pub fn c_action(ctx: &CycloContext, p: i64, q: i64, k: i64) -> TorusVector {
    let mut v = TorusVector::zero(ctx);
    let lower = Scalar::from(ctx.t_power(-p * q + 2 * q * k));
    let upper = Scalar::from(ctx.t_power(-p * q - 2 * q * k));
    // both terms have xpow 0, so these additions cannot fail
    v.add_color(k - p, &lower).expect("ungraded");
    v.add_color(k + p, &upper).expect("ungraded");
    v
}

/// Matrix of `C(p,q)` in the basis `V^1(α), …, V^{r−1}(α)`.
pub fn c_matrix(ctx: &CycloContext, p: i64, q: i64) -> OperatorMatrix {
    let cols: Vec<TorusVector> = (1..=ctx.dim() as i64).map(|k| c_action(ctx, p, q, k)).collect();
    OperatorMatrix::from_columns(ctx, &cols).expect("one column per basis vector")
}

/// Matrix of `S(np', nq')`, recovered from the cosines by
/// `sin(nx)/sin(x) = Σ_{m ≡ n−1 (2), 0 < m < n} 2cos(mx) + [n odd]`.
pub fn s_matrix_op(ctx: &CycloContext, p: i64, q: i64) -> OperatorMatrix {
    let slope = SlopeData::new(p, q);
    let Some((pp, qp)) = slope.primitive else {
        return OperatorMatrix::zero(ctx);
    };
    let n = slope.d;
    let mut acc = if n % 2 == 1 { OperatorMatrix::identity(ctx) } else { OperatorMatrix::zero(ctx) };
    let mut m = n - 1;
    while m > 0 {
        acc = &acc + &c_matrix(ctx, m * pp, m * qp);
        m -= 2;
    }
    acc
}

/// `<C(p,q) V^k, V^m> = t^{−pq} ([k(m+q)] t^{−2mp} + [k(m−q)] t^{2mp})`.
pub fn pairing_form(ctx: &CycloContext, p: i64, q: i64, k: i64, m: i64) -> CycloElement {
    let a = ctx.qint(k * (m + q)) * ctx.t_power(-2 * m * p);
    let b = ctx.qint(k * (m - q)) * ctx.t_power(2 * m * p);
    ctx.t_power(-p * q) * (a + b)
}

/// The same pairing written as four roots of unity over `t² − t^{−2}`.
pub fn four_term_form(ctx: &CycloContext, p: i64, q: i64, k: i64, m: i64) -> CycloElement {
    let num = ctx.t_power(2 * (q * k - p * m + k * m)) - ctx.t_power(2 * (q * k + p * m - k * m))
        + ctx.t_power(2 * (-q * k + p * m + k * m))
        - ctx.t_power(2 * (-q * k - p * m - k * m));
    let den = ctx.t_power(2) - ctx.t_power(-2);
    let den_inv = den.inv().expect("t² ≠ t^{-2} for r ≥ 3");
    ctx.t_power(-p * q) * num * den_inv
}

/// Both sides of `C(m,n) C(p,q) = t^d C(m+p,n+q) + t^{−d} C(m−p,n−q)`,
/// where `d = mq − np`.
#[derive(Clone, Debug)]
pub struct ProductToSum {
    pub d: i64,
    pub lhs: OperatorMatrix,
    /// `t^d C(m+p, n+q)`
    pub sum_term: OperatorMatrix,
    /// `t^{−d} C(m−p, n−q)`
    pub difference_term: OperatorMatrix,
    pub rhs: OperatorMatrix,
}

impl ProductToSum {
    pub fn compute(ctx: &CycloContext, m: i64, n: i64, p: i64, q: i64) -> Self {
        let d = m * q - n * p;
        let lhs = &c_matrix(ctx, m, n) * &c_matrix(ctx, p, q);
        let sum_term = c_matrix(ctx, m + p, n + q).scale(&Scalar::from(ctx.t_power(d)));
        let difference_term = c_matrix(ctx, m - p, n - q).scale(&Scalar::from(ctx.t_power(-d)));
        let rhs = &sum_term + &difference_term;
        ProductToSum { d, lhs, sum_term, difference_term, rhs }
    }

    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn report(&self) -> ProductToSumReport {
        ProductToSumReport {
            d: self.d,
            ok: self.holds(),
            lhs: self.lhs.to_wire(),
            rhs: self.rhs.to_wire(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductToSumReport {
    pub d: i64,
    pub ok: bool,
    pub lhs: MatrixWire,
    pub rhs: MatrixWire,
}

/// Computes and checks the product-to-sum identity, failing with the first
/// differing entry.
pub fn product_to_sum(ctx: &CycloContext, m: i64, n: i64, p: i64, q: i64) -> Result<ProductToSum> {
    let pts = ProductToSum::compute(ctx, m, n, p, q);
    match pts.lhs.first_difference(&pts.rhs) {
        None => Ok(pts),
        Some((i, j)) => Err(Error::VerificationFailed {
            location: format!("r={} (m,n,p,q)=({m},{n},{p},{q}) entry ({i},{j})", ctx.level()),
            lhs: pts.lhs.get(i, j).to_string(),
            rhs: pts.rhs.get(i, j).to_string(),
        }),
    }
}
