//! Exact Gaussian elimination over `Q(ζ_{4r})`.

use std::ops::{Add, Mul, Sub};

use crate::cyclotomic::{CycloContext, CycloElement};

/// A dense matrix over the field, stored as rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    ctx: CycloContext,
    rows: usize,
    cols: usize,
    data: Vec<CycloElement>,
}

impl FieldMatrix {
    pub fn zero(ctx: &CycloContext, rows: usize, cols: usize) -> Self {
        FieldMatrix { ctx: ctx.clone(), rows, cols, data: vec![ctx.zero(); rows * cols] }
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(ctx: &CycloContext, rows: usize, columns: &[Vec<CycloElement>]) -> Self {
        let mut m = FieldMatrix::zero(ctx, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            for (i, x) in col.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        m
    }

    pub fn identity(ctx: &CycloContext, n: usize) -> Self {
        let mut m = FieldMatrix::zero(ctx, n, n);
        for i in 0..n {
            m.data[i * n + i] = ctx.one();
        }
        m
    }

    pub fn from_fn(ctx: &CycloContext, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> CycloElement) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        FieldMatrix { ctx: ctx.clone(), rows, cols, data }
    }

    pub fn context(&self) -> &CycloContext {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloElement {
        &self.data[i * self.cols + j]
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (FieldMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, pr);
            let inv = m.get(row, col).inv().expect("pivot is nonzero");
            for j in col..m.cols {
                let x = &m.data[row * m.cols + j] * &inv;
                m.data[row * m.cols + j] = x;
            }
            for i in 0..m.rows {
                if i == row || m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col).clone();
                for j in col..m.cols {
                    if m.get(row, j).is_zero() {
                        continue;
                    }
                    let x = &m.data[i * m.cols + j] - &(&f * &m.data[row * m.cols + j]);
                    m.data[i * m.cols + j] = x;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{x : Mx = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<CycloElement>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.ctx.zero(); self.cols];
                v[f] = self.ctx.one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(i, f);
                }
                v
            })
            .collect()
    }

    pub fn apply(&self, v: &[CycloElement]) -> Vec<CycloElement> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = self.ctx.zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, s: &CycloElement) -> Self {
        let data = self.data.iter().map(|x| x * s).collect();
        FieldMatrix { data, ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CycloElement::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl<'a> Mul<&'a FieldMatrix> for &'a FieldMatrix {
    type Output = FieldMatrix;

    /// Panics if the inner dimensions differ.
    fn mul(self, rhs: &FieldMatrix) -> FieldMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = FieldMatrix::zero(&self.ctx, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a FieldMatrix> for &'a FieldMatrix {
    type Output = FieldMatrix;

    fn add(self, rhs: &FieldMatrix) -> FieldMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes differ");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        FieldMatrix { data, ..self.clone() }
    }
}

impl<'a> Sub<&'a FieldMatrix> for &'a FieldMatrix {
    type Output = FieldMatrix;

    fn sub(self, rhs: &FieldMatrix) -> FieldMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes differ");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        FieldMatrix { data, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one() {
        let c = CycloContext::new(4).unwrap();
        let t = c.t_power(1);
        let cols = vec![vec![c.one(), t.clone()], vec![t.clone(), &t * &t]];
        let m = FieldMatrix::from_columns(&c, 2, &cols);
        assert_eq!(m.rank(), 1);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 1);
        assert!(m.apply(&ker[0]).iter().all(CycloElement::is_zero));
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        let c = CycloContext::new(5).unwrap();
        let cols: Vec<Vec<CycloElement>> =
            (0..3).map(|j| (0..3).map(|i| c.t_power(2 * i * j)).collect()).collect();
        let m = FieldMatrix::from_columns(&c, 3, &cols);
        assert_eq!(m.rank(), 3);
        assert!(m.kernel_basis().is_empty());
    }
}
