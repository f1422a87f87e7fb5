//! Fraction-free integer elimination for the oracle's hot loop.
//!
//! Collision checks reduce to row-space membership over the integers
//! (`ker M ⊆ ker N` iff every row of `N` lies in the row space of `M`).
//! Working in `i128` avoids bignum traffic; every multiplication is checked
//! and an overflow reports `None` so callers can fall back to the
//! arbitrary-precision path. The workspace variant reuses its storage, so a
//! full check performs no allocation in the steady state.

use num_integer::Integer;

/// Entry magnitude above which a reduced row is divided by its gcd. Growth
/// between normalizations is quadratic per elimination step, so this leaves
/// ample headroom below `i128::MAX`.
const NORMALIZE_ABOVE: i128 = 1 << 48;

/// Reusable echelon workspace over the integers.
///
/// Stored rows keep their pivot (first nonzero) columns pairwise distinct;
/// reducing an incoming row against them in ascending pivot order is exact
/// Gaussian elimination without fractions.
#[derive(Clone, Debug, Default)]
pub struct EchelonWorkspace {
    width: usize,
    /// Row-major storage of the echelon rows, in ascending pivot order.
    data: Vec<i128>,
    pivots: Vec<usize>,
}

impl EchelonWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self, width: usize) {
        self.width = width;
        self.data.clear();
        self.pivots.clear();
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    /// Reduce `row` in place against the stored rows. `Err(())` on
    /// overflow; otherwise the pivot column of the residual, or `None` when
    /// the row reduced to zero.
    fn reduce_in_place(&self, row: &mut [i128]) -> Result<Option<usize>, ()> {
        debug_assert_eq!(row.len(), self.width);
        for (i, &pcol) in self.pivots.iter().enumerate() {
            let c = row[pcol];
            if c == 0 {
                continue;
            }
            let prow = self.row(i);
            let p = prow[pcol];
            let mut big = false;
            for (r, pr) in row.iter_mut().zip(prow.iter()) {
                let a = r.checked_mul(p).ok_or(())?;
                let b = pr.checked_mul(c).ok_or(())?;
                *r = a.checked_sub(b).ok_or(())?;
                big |= r.unsigned_abs() > NORMALIZE_ABOVE as u128;
            }
            debug_assert_eq!(row[pcol], 0);
            if big {
                normalize(row);
            }
        }
        Ok(row.iter().position(|&v| v != 0))
    }

    /// Insert a row (consumed from the scratch slice); `Some(true)` if it
    /// grew the rank, `None` on overflow.
    pub fn insert(&mut self, row: &mut [i128]) -> Option<bool> {
        match self.reduce_in_place(row) {
            Err(()) => None,
            Ok(None) => Some(false),
            Ok(Some(pivot)) => {
                let at = self
                    .pivots
                    .binary_search(&pivot)
                    .expect_err("pivot columns are distinct");
                self.pivots.insert(at, pivot);
                let offset = at * self.width;
                // make room in the flat buffer at `offset`
                let old_len = self.data.len();
                self.data.resize(old_len + self.width, 0);
                self.data.copy_within(offset..old_len, offset + self.width);
                self.data[offset..offset + self.width].copy_from_slice(row);
                Some(true)
            }
        }
    }

    /// Membership test, destructive on the scratch row. `None` on overflow.
    pub fn contains(&self, row: &mut [i128]) -> Option<bool> {
        match self.reduce_in_place(row) {
            Err(()) => None,
            Ok(residual) => Some(residual.is_none()),
        }
    }
}

fn normalize(row: &mut [i128]) {
    let mut g: i128 = 0;
    for &v in row.iter() {
        g = g.gcd(&v);
        if g == 1 {
            return;
        }
    }
    if g > 1 {
        for v in row.iter_mut() {
            *v /= g;
        }
    }
}

/// Incrementally built echelon basis of an integer row space. Thin
/// allocating wrapper over [`EchelonWorkspace`] for non-hot-path callers.
#[derive(Clone, Debug, Default)]
pub struct IntRowSpace {
    ws: EchelonWorkspace,
    initialized: bool,
}

impl IntRowSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.ws.rank()
    }

    /// Insert a row; `Some(true)` if it grew the rank, `None` on overflow.
    pub fn insert(&mut self, mut row: Vec<i128>) -> Option<bool> {
        if !self.initialized {
            self.ws.reset(row.len());
            self.initialized = true;
        }
        self.ws.insert(&mut row)
    }

    /// Membership test: does `row` lie in the span? `None` on overflow.
    pub fn contains(&self, row: &[i128]) -> Option<bool> {
        let mut scratch = row.to_vec();
        self.ws.contains(&mut scratch)
    }
}

/// Exact rank of an integer matrix; `None` on `i128` overflow.
pub fn int_rank(rows: &[Vec<i128>]) -> Option<usize> {
    let mut space = IntRowSpace::new();
    for row in rows {
        space.insert(row.clone())?;
    }
    Some(space.rank())
}

/// Does every row of `extra` lie in the row space of `main`? Equivalently
/// `ker(main) ⊆ ker(extra)`. `None` on overflow.
pub fn rows_reduce_to_zero(main: &[Vec<i128>], extra: &[Vec<i128>]) -> Option<bool> {
    let mut space = IntRowSpace::new();
    for row in main {
        space.insert(row.clone())?;
    }
    for row in extra {
        if !space.contains(row)? {
            return Some(false);
        }
    }
    Some(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_matches_small_cases() {
        assert_eq!(int_rank(&[vec![1, 2], vec![2, 4]]), Some(1));
        assert_eq!(int_rank(&[vec![1, 0], vec![0, 1]]), Some(2));
        assert_eq!(int_rank(&[vec![0, 0]]), Some(0));
        assert_eq!(
            int_rank(&[vec![2, 4, 6], vec![1, 2, 3], vec![0, 1, 1]]),
            Some(2)
        );
    }

    #[test]
    fn membership_detects_kernel_containment() {
        // ker of [1 -1] is the diagonal; [1 -1] lies in its own row space
        let main = vec![vec![1i128, -1]];
        assert_eq!(rows_reduce_to_zero(&main, &[vec![1, -1]]), Some(true));
        assert_eq!(rows_reduce_to_zero(&main, &[vec![1, 1]]), Some(false));
        assert_eq!(rows_reduce_to_zero(&main, &[vec![2, -2]]), Some(true));
    }

    #[test]
    fn workspace_insertion_order_is_irrelevant() {
        // rows arriving with decreasing pivots still reduce members exactly
        let rows: Vec<Vec<i128>> = vec![
            vec![0, 0, 3, 1],
            vec![0, 2, 1, 0],
            vec![5, 1, 0, 2],
        ];
        let mut ws = EchelonWorkspace::new();
        ws.reset(4);
        for r in &rows {
            let mut scratch = r.clone();
            assert_eq!(ws.insert(&mut scratch), Some(true));
        }
        assert_eq!(ws.rank(), 3);
        // a combination of the rows is contained
        let mut combo: Vec<i128> = (0..4).map(|j| rows[0][j] * 2 - rows[1][j] + rows[2][j] * 3).collect();
        assert_eq!(ws.contains(&mut combo), Some(true));
        let mut outside = vec![0i128, 0, 0, 7];
        assert_eq!(ws.contains(&mut outside), Some(false));
    }
}
