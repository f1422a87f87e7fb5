//! Matrices over `Q[y]`, the characteristic matrix, and Smith normal form.

use super::{ExactError, PolyQ, Rational, RationalMatrix};
use num_traits::{One, Zero};
use std::fmt;

/// Dense row-major matrix with polynomial entries.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<PolyQ>,
}

/// `U * P * V = diag(d1, ..., dk)` with each `di` monic or zero,
/// `di | di+1`, and `U`, `V` unimodular (constant nonzero determinant).
#[derive(Clone, Debug)]
pub struct SmithNormalForm {
    pub diag: Vec<PolyQ>,
    pub u: PolyMatrix,
    pub v: PolyMatrix,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![PolyQ::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, PolyQ::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> PolyQ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self { rows, cols, entries }
    }

    /// The characteristic matrix `yI - T`.
    pub fn char_matrix(t: &RationalMatrix) -> Result<Self, ExactError> {
        if !t.is_square() {
            return Err(ExactError::NonSquare {
                rows: t.rows(),
                cols: t.cols(),
            });
        }
        let n = t.rows();
        Ok(Self::from_fn(n, n, |r, c| {
            let neg = PolyQ::constant(-t.at(r, c).clone());
            if r == c {
                &neg + &PolyQ::y()
            } else {
                neg
            }
        }))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &PolyQ {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: PolyQ) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "polymatrix matmul shape mismatch");
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
                    let v = &(a * b) + out.at(r, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows)
            .all(|r| (0..self.cols).all(|c| r == c || self.at(r, c).is_zero()))
    }

    /// Fraction-free determinant (Bareiss). Exact over `Q[y]`: every
    /// division in the elimination is exact in the polynomial ring.
    pub fn determinant(&self) -> Result<PolyQ, ExactError> {
        if self.rows != self.cols {
            return Err(ExactError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(PolyQ::one());
        }
        let mut m = self.clone();
        let mut sign = false;
        let mut prev = PolyQ::one();
        for k in 0..n - 1 {
            if m.at(k, k).is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !m.at(r, k).is_zero()) else {
                    return Ok(PolyQ::zero());
                };
                for c in 0..n {
                    let tmp = m.at(swap, c).clone();
                    m.set(swap, c, m.at(k, c).clone());
                    m.set(k, c, tmp);
                }
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(m.at(k, k) * m.at(i, j)) - &(m.at(i, k) * m.at(k, j));
                    let (q, r) = num.div_rem(&prev)?;
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    m.set(i, j, q);
                }
            }
            prev = m.at(k, k).clone();
        }
        let det = m.at(n - 1, n - 1).clone();
        Ok(if sign { -&det } else { det })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let tmp = self.at(a, c).clone();
            let other = self.at(b, c).clone();
            self.set(a, c, other);
            self.set(b, c, tmp);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let tmp = self.at(r, a).clone();
            let other = self.at(r, b).clone();
            self.set(r, a, other);
            self.set(r, b, tmp);
        }
    }

    /// `row_i -= q * row_j`
    fn row_axpy(&mut self, i: usize, j: usize, q: &PolyQ) {
        for c in 0..self.cols {
            let v = self.at(i, c) - &(q * self.at(j, c));
            self.set(i, c, v);
        }
    }

    /// `col_i -= q * col_j`
    fn col_axpy(&mut self, i: usize, j: usize, q: &PolyQ) {
        for r in 0..self.rows {
            let v = self.at(r, i) - &(q * self.at(r, j));
            self.set(r, i, v);
        }
    }

    fn scale_row(&mut self, i: usize, s: &Rational) {
        for c in 0..self.cols {
            let v = self.at(i, c).scale(s);
            self.set(i, c, v);
        }
    }

    /// Smith normal form over `Q[y]`.
    ///
    /// Pivot selection is deterministic: the nonzero entry of minimal degree
    /// in the working submatrix, ties broken in row-major order; each settled
    /// pivot is normalized to be monic.
    pub fn smith_normal_form(&self) -> Result<SmithNormalForm, ExactError> {
        if self.rows != self.cols {
            return Err(ExactError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut u = Self::identity(n);
        let mut v = Self::identity(n);

        let min_degree_entry = |m: &Self, t: usize| -> Option<(usize, usize)> {
            let mut best: Option<(usize, usize, usize)> = None;
            for r in t..n {
                for c in t..n {
                    if let Some(d) = m.at(r, c).degree() {
                        if best.map_or(true, |(bd, _, _)| d < bd) {
                            best = Some((d, r, c));
                        }
                    }
                }
            }
            best.map(|(_, r, c)| (r, c))
        };

        for t in 0..n {
            'settle: loop {
                let Some((pr, pc)) = min_degree_entry(&m, t) else {
                    // remaining submatrix is zero
                    break 'settle;
                };
                m.swap_rows(t, pr);
                u.swap_rows(t, pr);
                m.swap_cols(t, pc);
                v.swap_cols(t, pc);

                let lead = m.at(t, t).leading_coeff().recip();
                m.scale_row(t, &lead);
                u.scale_row(t, &lead);

                // clear the pivot column and row; non-exact divisions leave
                // remainders of strictly smaller degree, so re-selecting the
                // pivot terminates
                let mut dirty = false;
                for r in t + 1..n {
                    if m.at(r, t).is_zero() {
                        continue;
                    }
                    let (q, rem) = m.at(r, t).div_rem(m.at(t, t))?;
                    m.row_axpy(r, t, &q);
                    u.row_axpy(r, t, &q);
                    if !rem.is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    continue 'settle;
                }
                for c in t + 1..n {
                    if m.at(t, c).is_zero() {
                        continue;
                    }
                    let (q, rem) = m.at(t, c).div_rem(m.at(t, t))?;
                    m.col_axpy(c, t, &q);
                    v.col_axpy(c, t, &q);
                    if !rem.is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    continue 'settle;
                }

                // divisibility sweep: the pivot must divide every remaining
                // entry; folding an offending row into the pivot row forces a
                // strictly smaller pivot degree on the next pass
                let offender = (t + 1..n).find(|&r| {
                    (t + 1..n).any(|c| !m.at(t, t).divides(m.at(r, c)))
                });
                if let Some(r) = offender {
                    let one = PolyQ::one();
                    // row_t += row_r  (axpy with q = -1)
                    m.row_axpy(t, r, &-&one);
                    u.row_axpy(t, r, &-&one);
                    continue 'settle;
                }
                break 'settle;
            }
        }

        let diag: Vec<PolyQ> = (0..n).map(|i| m.at(i, i).clone()).collect();
        debug_assert!(m.is_diagonal());
        debug_assert!(diag.iter().all(|d| d.is_zero() || d.is_monic()));
        for w in diag.windows(2) {
            debug_assert!(w[0].divides(&w[1]) || w[1].is_zero());
        }
        Ok(SmithNormalForm { diag, u, v })
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{}", self.at(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Characteristic polynomial `det(yI - T)` via the Faddeev–LeVerrier
/// recurrence; exact over `Q` and independent of the Smith normal form
/// route, so the two can cross-check each other.
pub fn charpoly(t: &RationalMatrix) -> Result<PolyQ, ExactError> {
    if !t.is_square() {
        return Err(ExactError::NonSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let n = t.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m = RationalMatrix::identity(n);
    for k in 1..=n {
        let am = t.matmul(&m);
        let mut trace = Rational::zero();
        for i in 0..n {
            trace += am.at(i, i);
        }
        let c = -trace / Rational::from_integer(k.into());
        coeffs[n - k] = c.clone();
        let mut next = am;
        for i in 0..n {
            let v = next.at(i, i) + &c;
            next.set(i, i, v);
        }
        m = next;
    }
    Ok(PolyQ::from_coeffs(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat_int;

    #[test]
    fn charpoly_identity() {
        let p = charpoly(&RationalMatrix::identity(2)).unwrap();
        // (y - 1)^2
        assert_eq!(p, PolyQ::from_int_coeffs(&[1, -2, 1]));
    }

    #[test]
    fn charpoly_companion() {
        // companion matrix of y^2 + 1
        let c = RationalMatrix::from_int_rows(&[vec![0, -1], vec![1, 0]]);
        assert_eq!(charpoly(&c).unwrap(), PolyQ::from_int_coeffs(&[1, 0, 1]));
        assert!(charpoly(&RationalMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn char_matrix_det_matches_charpoly() {
        let t = RationalMatrix::from_int_rows(&[vec![1, 2, 0], vec![0, 3, 1], vec![5, 0, 2]]);
        let cm = PolyMatrix::char_matrix(&t).unwrap();
        assert_eq!(cm.determinant().unwrap(), charpoly(&t).unwrap());
    }

    #[test]
    fn snf_of_zero_matrix_char() {
        // yI - 0 is already diag(y, y)
        let t = RationalMatrix::zeros(2, 2);
        let cm = PolyMatrix::char_matrix(&t).unwrap();
        let snf = cm.smith_normal_form().unwrap();
        assert_eq!(snf.diag, vec![PolyQ::y(), PolyQ::y()]);
    }

    #[test]
    fn snf_of_nilpotent_jordan_block() {
        let t = RationalMatrix::from_int_rows(&[vec![0, 1], vec![0, 0]]);
        let cm = PolyMatrix::char_matrix(&t).unwrap();
        let snf = cm.smith_normal_form().unwrap();
        assert_eq!(snf.diag, vec![PolyQ::one(), PolyQ::from_int_coeffs(&[0, 0, 1])]);
        // U (yI - T) V = diag
        let prod = snf.u.matmul(&cm).matmul(&snf.v);
        assert!(prod.is_diagonal());
        for i in 0..2 {
            assert_eq!(prod.at(i, i), &snf.diag[i]);
        }
        // unimodular transforms
        assert!(snf.u.determinant().unwrap().is_constant());
        assert!(snf.v.determinant().unwrap().is_constant());
    }

    #[test]
    fn snf_of_diagonal_distinct() {
        let t = RationalMatrix::diagonal(&[rat_int(1), rat_int(2)]);
        let cm = PolyMatrix::char_matrix(&t).unwrap();
        let snf = cm.smith_normal_form().unwrap();
        // diag(1, (y-1)(y-2))
        assert_eq!(snf.diag[0], PolyQ::one());
        assert_eq!(snf.diag[1], PolyQ::from_int_coeffs(&[2, -3, 1]));
    }
}
