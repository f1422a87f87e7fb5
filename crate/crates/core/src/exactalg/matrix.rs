//! Dense matrices over the rationals with exact row reduction.

use super::{rat_int, ExactError, Rational};
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense row-major matrix of arbitrary-precision rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

/// Outcome of reduced-row-echelon elimination.
#[derive(Clone, Debug)]
pub struct RrefResult {
    pub reduced: RationalMatrix,
    /// Pivot column of each pivot row, in row order.
    pub pivots: Vec<usize>,
}

impl RrefResult {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ExactError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(ExactError::RaggedRows {
                    row: i,
                    got: row.len(),
                    expected: ncols,
                });
            }
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Build from integer literals; convenient in tests and generators.
    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat_int(v)).collect())
                .collect(),
        )
        .expect("integer literal rows must be rectangular")
    }

    pub fn from_columns(cols: &[Vec<Rational>]) -> Result<Self, ExactError> {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, |c| c.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != nrows {
                return Err(ExactError::RaggedRows {
                    row: j,
                    got: col.len(),
                    expected: nrows,
                });
            }
        }
        Ok(Self::from_fn(nrows, ncols, |r, c| cols[c][r].clone()))
    }

    pub fn diagonal(values: &[Rational]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, c| {
            if r == c {
                values[r].clone()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    /// Matrix product. Shape mismatch is a programming error here; the
    /// fallible public operations validate shapes before multiplying.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(r, c) + &(a * b);
                    out.set(r, c, cur);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for c in 0..self.cols {
                    if !self.at(r, c).is_zero() && !v[c].is_zero() {
                        acc += self.at(r, c) * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + rhs.cols, |r, c| {
            if c < self.cols {
                self.at(r, c).clone()
            } else {
                rhs.at(r, c - self.cols).clone()
            }
        })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, below: &Self) -> Self {
        assert_eq!(self.cols, below.cols, "vstack column mismatch");
        Self::from_fn(self.rows + below.rows, self.cols, |r, c| {
            if r < self.rows {
                self.at(r, c).clone()
            } else {
                below.at(r - self.rows, c).clone()
            }
        })
    }

    /// Reduced row echelon form. Deterministic: the pivot in each column is
    /// the first nonzero entry below the current row, with no magnitude
    /// pivoting (the arithmetic is exact).
    pub fn rref(&self) -> RrefResult {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0usize;
        for col in 0..m.cols {
            if prow >= m.rows {
                break;
            }
            let Some(hit) = (prow..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            if hit != prow {
                for c in 0..m.cols {
                    let tmp = m.at(hit, c).clone();
                    m.set(hit, c, m.at(prow, c).clone());
                    m.set(prow, c, tmp);
                }
            }
            let inv = m.at(prow, col).recip();
            for c in col..m.cols {
                let v = m.at(prow, c) * &inv;
                m.set(prow, c, v);
            }
            for r in 0..m.rows {
                if r == prow || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for c in col..m.cols {
                    let v = m.at(r, c) - &(&factor * m.at(prow, c));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            prow += 1;
        }
        RrefResult { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Basis of the right null space, returned as the columns of a
    /// `cols x nullity` matrix. `self * result = 0` exactly and the columns
    /// are linearly independent. Deterministic: one column per free column
    /// of the RREF, in ascending column order.
    pub fn kernel_basis(&self) -> Self {
        let RrefResult { reduced, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut cols = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -reduced.at(prow, f).clone();
            }
            cols.push(v);
        }
        if cols.is_empty() {
            return Self::zeros(self.cols, 0);
        }
        Self::from_columns(&cols).expect("kernel columns share a length")
    }

    pub fn determinant(&self) -> Result<Rational, ExactError> {
        if !self.is_square() {
            return Err(ExactError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rational::one();
        for col in 0..n {
            let Some(hit) = (col..n).find(|&r| !m.at(r, col).is_zero()) else {
                return Ok(Rational::zero());
            };
            if hit != col {
                for c in 0..n {
                    let tmp = m.at(hit, c).clone();
                    m.set(hit, c, m.at(col, c).clone());
                    m.set(col, c, tmp);
                }
                det = -det;
            }
            let pivot = m.at(col, col).clone();
            det *= &pivot;
            let inv = pivot.recip();
            for r in col + 1..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col) * &inv;
                for c in col..n {
                    let v = m.at(r, c) - &(&factor * m.at(col, c));
                    m.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse; `None` when singular. Panics on non-square input.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse requires a square matrix");
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n));
        let RrefResult { reduced, pivots } = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(Self::from_fn(n, n, |r, c| reduced.at(r, n + c).clone()))
    }

    /// One particular solution `X` of `self * X = rhs`, or `None` when the
    /// system is inconsistent. Free variables are set to zero.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "solve shape mismatch");
        let aug = self.hstack(rhs);
        let RrefResult { reduced, pivots } = aug.rref();
        // A pivot in the augmented block means an inconsistent row.
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (prow, &pcol) in pivots.iter().enumerate() {
            for c in 0..rhs.cols {
                x.set(pcol, c, reduced.at(prow, self.cols + c).clone());
            }
        }
        Some(x)
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| super::format_rational(self.at(r, c)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Add for &RationalMatrix {
    type Output = RationalMatrix;
    fn add(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        RationalMatrix::from_fn(self.rows, self.cols, |r, c| self.at(r, c) + rhs.at(r, c))
    }
}

impl Sub for &RationalMatrix {
    type Output = RationalMatrix;
    fn sub(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        RationalMatrix::from_fn(self.rows, self.cols, |r, c| self.at(r, c) - rhs.at(r, c))
    }
}

impl Neg for &RationalMatrix {
    type Output = RationalMatrix;
    fn neg(self) -> RationalMatrix {
        RationalMatrix::from_fn(self.rows, self.cols, |r, c| -self.at(r, c).clone())
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        self.matmul(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn rref_identity_and_zero() {
        let id = RationalMatrix::identity(3);
        let r = id.rref();
        assert_eq!(r.reduced, id);
        assert_eq!(r.pivots, vec![0, 1, 2]);
        assert_eq!(r.rank(), 3);

        let z = RationalMatrix::zeros(2, 2);
        let r = z.rref();
        assert_eq!(r.reduced, z);
        assert!(r.pivots.is_empty());
        assert_eq!(r.rank(), 0);
    }

    #[test]
    fn rref_rank_one() {
        let m = RationalMatrix::from_int_rows(&[vec![1, 2], vec![2, 4]]);
        let r = m.rref();
        assert_eq!(r.rank(), 1);
        assert_eq!(
            r.reduced,
            RationalMatrix::from_int_rows(&[vec![1, 2], vec![0, 0]])
        );
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let k = RationalMatrix::identity(4).kernel_basis();
        assert_eq!((k.rows(), k.cols()), (4, 0));
    }

    #[test]
    fn kernel_simple_line() {
        let m = RationalMatrix::from_int_rows(&[vec![1, 1]]);
        let k = m.kernel_basis();
        assert_eq!((k.rows(), k.cols()), (2, 1));
        // spans (1, -1) up to scale
        assert_eq!(k.at(0, 0) + k.at(1, 0), rat_int(0));
        assert!(m.matmul(&k).is_zero());
    }

    #[test]
    fn kernel_nilpotent_block() {
        let m = RationalMatrix::from_int_rows(&[vec![0, 1], vec![0, 0]]);
        let k = m.kernel_basis();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.at(0, 0), &rat_int(1));
        assert_eq!(k.at(1, 0), &rat_int(0));
    }

    #[test]
    fn solve_and_inverse() {
        let a = RationalMatrix::from_int_rows(&[vec![2, 1], vec![1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), RationalMatrix::identity(2));

        let b = RationalMatrix::from_int_rows(&[vec![3], vec![2]]);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.matmul(&x), b);

        // inconsistent system
        let sing = RationalMatrix::from_int_rows(&[vec![1, 1], vec![1, 1]]);
        let bad = RationalMatrix::from_int_rows(&[vec![0], vec![1]]);
        assert!(sing.solve(&bad).is_none());
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn determinant_matches_cofactor_small() {
        let a = RationalMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(1, 5), rat(2, 1)],
        ])
        .unwrap();
        let det = a.determinant().unwrap();
        assert_eq!(det, rat(1, 2) * rat(2, 1) - rat(1, 3) * rat(1, 5));
        assert!(RationalMatrix::zeros(2, 3).determinant().is_err());
    }

    #[test]
    fn rank_plus_nullity() {
        let m = RationalMatrix::from_int_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(m.rank() + k.cols(), m.cols());
        assert!(m.matmul(&k).is_zero());
    }
}
