//! Dense exact linear algebra over the rationals.
//!
//! Everything here is deterministic: pivots are always the leftmost nonzero
//! column in the topmost unused row, so reduced forms are canonical and safe
//! to compare byte-for-byte after rendering.

use crate::scalar::Rational;
use num::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        for r in &rows {
            assert_eq!(r.len(), ncols, "ragged rows");
        }
        Matrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = Matrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for c in 0..self.cols {
                    if !self[(r, c)].is_zero() && !v[c].is_zero() {
                        acc += &self[(r, c)] * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> Matrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= factor;
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let found = (pivot_row..m.rows).find(|&r| !m[(r, col)].is_zero());
            let Some(src) = found else { continue };
            m.swap_rows(pivot_row, src);
            let inv = m[(pivot_row, col)].recip();
            m.scale_row(pivot_row, &inv);
            for r in 0..m.rows {
                if r != pivot_row && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    m.axpy_row(r, pivot_row, &(-factor));
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : Ax = 0}`, in canonical order.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (m, pivots) = self.rref();
        let mut is_pivot = vec![None; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(i);
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, factor: &Rational) {
        for c in 0..self.cols {
            self[(r, c)] *= factor;
        }
    }

    /// row[r] += factor * row[src]
    fn axpy_row(&mut self, r: usize, src: usize, factor: &Rational) {
        for c in 0..self.cols {
            let add = &self[(src, c)] * factor;
            self[(r, c)] += add;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

/// Canonical spanning matrix of a row space: RREF with zero rows dropped.
/// Two row sets span the same subspace iff their reduced forms are equal.
pub fn row_space(rows: &[Vec<Rational>], cols: usize) -> Matrix {
    if rows.is_empty() {
        return Matrix::zero(0, cols);
    }
    let (m, pivots) = Matrix::from_rows(rows.to_vec()).rref();
    let kept: Vec<Vec<Rational>> = (0..pivots.len()).map(|r| m.row(r).to_vec()).collect();
    if kept.is_empty() {
        Matrix::zero(0, cols)
    } else {
        Matrix::from_rows(kept)
    }
}

pub fn rank_of_rows(rows: &[Vec<Rational>], cols: usize) -> usize {
    row_space(rows, cols).row_count()
}

/// Dimension of the intersection of two row spaces in the same ambient space.
pub fn intersection_dim(a: &[Vec<Rational>], b: &[Vec<Rational>], cols: usize) -> usize {
    let ra = rank_of_rows(a, cols);
    let rb = rank_of_rows(b, cols);
    let mut all = a.to_vec();
    all.extend_from_slice(b);
    ra + rb - rank_of_rows(&all, cols)
}

/// True if `v` lies in the span of `rows`.
pub fn in_row_space(rows: &[Vec<Rational>], v: &[Rational], cols: usize) -> bool {
    let base = rank_of_rows(rows, cols);
    let mut all = rows.to_vec();
    all.push(v.to_vec());
    rank_of_rows(&all, cols) == base
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};

    #[test]
    fn rref_and_rank() {
        let m = Matrix::from_rows(vec![
            vec![rat(1), rat(2), rat(3)],
            vec![rat(2), rat(4), rat(6)],
            vec![rat(0), rat(1), rat(1)],
        ]);
        assert_eq!(m.rank(), 2);
        let (r, pivots) = m.rref();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(r[(0, 2)], rat(1));
        assert_eq!(r[(1, 2)], rat(1));
    }

    #[test]
    fn kernel_solves() {
        let m = Matrix::from_rows(vec![vec![rat(1), rat(1), rat(0)], vec![rat(0), rat(1), rat(1)]]);
        let basis = m.kernel_basis();
        assert_eq!(basis.len(), 1);
        for v in &basis {
            assert!(m.mul_vec(v).iter().all(num::Zero::is_zero));
        }
    }

    #[test]
    fn row_space_is_canonical() {
        let a = vec![vec![rat(1), rat(1)], vec![rat(0), rat(2)]];
        let b = vec![vec![ratio(1, 2), rat(0)], vec![rat(3), rat(1)]];
        assert_eq!(row_space(&a, 2), row_space(&b, 2));
        assert_eq!(intersection_dim(&a, &b, 2), 2);
    }
}
