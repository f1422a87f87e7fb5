//! Signed permutations, coordinate projections, and the codimension
//! accounting behind the permutation uniqueness bound.
//!
//! For a composite signed permutation `pi` and projections `rho1`, `rho2`,
//! any nonzero collision vector is an eigenvector-like solution of
//! `rho2 rho1 pi (v) = lambda rho2 (v)` with `lambda` outside the excluded
//! scalars. Propagating forced zeros along the orbits of `pi` and charging
//! complete and incomplete cycles separately yields a codimension bound of
//! at least `floor(|I2| / 2)`, where `I2` is the kept set of `rho2`.

use crate::exactalg::{rat_int, PolyQ, Rational, RationalMatrix};
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("image array is not a bijection on 0..{size}")]
    NotABijection { size: usize },
    #[error("sign vector has length {got}, expected {expected}")]
    SignLength { got: usize, expected: usize },
    #[error("sign entries must be +1 or -1")]
    BadSign,
    #[error("kept index {index} is out of range for size {size}")]
    KeptOutOfRange { index: usize, size: usize },
    #[error("size mismatch: permutation on {perm} vs projections on {rho1} and {rho2}")]
    SizeMismatch { perm: usize, rho1: usize, rho2: usize },
}

/// A signed permutation of the coordinates: index `j` maps to slot
/// `perm[j]`, and slot `i` carries the sign `signs[i]`. As a matrix this is
/// `Sigma * Pi` with `Sigma = diag(signs)` and `Pi` the permutation matrix
/// of `perm`, so `(apply(x))_i = signs[i] * x[perm^{-1}(i)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self, PermError> {
        let size = perm.len();
        let mut seen = vec![false; size];
        for &img in &perm {
            if img >= size || seen[img] {
                return Err(PermError::NotABijection { size });
            }
            seen[img] = true;
        }
        if signs.len() != size {
            return Err(PermError::SignLength {
                got: signs.len(),
                expected: size,
            });
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(PermError::BadSign);
        }
        Ok(Self { perm, signs })
    }

    /// Plain permutation (all signs +1).
    pub fn plain(perm: Vec<usize>) -> Result<Self, PermError> {
        let signs = vec![1; perm.len()];
        Self::new(perm, signs)
    }

    pub fn identity(size: usize) -> Self {
        Self {
            perm: (0..size).collect(),
            signs: vec![1; size],
        }
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn image(&self, j: usize) -> usize {
        self.perm[j]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn has_negative_sign(&self) -> bool {
        self.signs.iter().any(|&s| s == -1)
    }

    pub fn inverse(&self) -> Self {
        let size = self.size();
        let mut perm = vec![0; size];
        let mut signs = vec![1; size];
        for j in 0..size {
            perm[self.perm[j]] = j;
            signs[j] = self.signs[self.perm[j]];
        }
        Self { perm, signs }
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.size(), other.size(), "compose size mismatch");
        let size = self.size();
        let inv_self: Vec<usize> = {
            let mut inv = vec![0; size];
            for j in 0..size {
                inv[self.perm[j]] = j;
            }
            inv
        };
        let perm = (0..size).map(|j| self.perm[other.perm[j]]).collect();
        let signs = (0..size)
            .map(|i| self.signs[i] * other.signs[inv_self[i]])
            .collect();
        Self { perm, signs }
    }

    /// Matrix representation `Sigma * Pi`.
    pub fn to_matrix(&self) -> RationalMatrix {
        let size = self.size();
        let mut m = RationalMatrix::zeros(size, size);
        for j in 0..size {
            let i = self.perm[j];
            m.set(i, j, rat_int(self.signs[i] as i64));
        }
        m
    }

    /// Apply to a coordinate vector.
    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.size());
        let inv = self.inverse();
        (0..self.size())
            .map(|i| {
                let src = inv.perm[i];
                let val = v[src].clone();
                if self.signs[i] == 1 {
                    val
                } else {
                    -val
                }
            })
            .collect()
    }
}

/// Coordinate projection: keeps a subset of coordinates, zeroes the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateProjection {
    size: usize,
    kept: Vec<usize>,
}

impl CoordinateProjection {
    pub fn new(size: usize, mut kept: Vec<usize>) -> Result<Self, PermError> {
        kept.sort_unstable();
        kept.dedup();
        if let Some(&bad) = kept.iter().find(|&&i| i >= size) {
            return Err(PermError::KeptOutOfRange { index: bad, size });
        }
        Ok(Self { size, kept })
    }

    pub fn full(size: usize) -> Self {
        Self {
            size,
            kept: (0..size).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.kept.len()
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn keeps(&self, i: usize) -> bool {
        self.kept.binary_search(&i).is_ok()
    }

    pub fn dropped(&self) -> Vec<usize> {
        (0..self.size).filter(|&i| !self.keeps(i)).collect()
    }

    pub fn to_matrix(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.size, self.size);
        for &i in &self.kept {
            m.set(i, i, Rational::one());
        }
        m
    }
}

/// Orbits of the underlying permutation. Each orbit starts at its minimal
/// element and is listed in traversal order; fixed points are singletons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<usize>>,
}

pub fn cycle_decomposition(pi: &SignedPermutation) -> CycleDecomposition {
    let size = pi.size();
    let mut seen = vec![false; size];
    let mut cycles = Vec::new();
    for start in 0..size {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut cur = pi.image(start);
        while cur != start {
            seen[cur] = true;
            orbit.push(cur);
            cur = pi.image(cur);
        }
        cycles.push(orbit);
    }
    CycleDecomposition { cycles }
}

/// Characteristic polynomial of a single signed cycle of length `l` with the
/// given signs: `y^l - (product of signs)`, together with whether it is
/// squarefree (always true in characteristic zero; returned so tests can
/// assert it rather than assume it).
pub fn signed_cycle_eigen_check(signs: &[i8]) -> (PolyQ, bool) {
    let l = signs.len();
    assert!(l >= 1, "a cycle has length at least 1");
    let product: i64 = signs.iter().map(|&s| s as i64).product();
    let mut coeffs = vec![rat_int(-product)];
    coeffs.extend(std::iter::repeat(rat_int(0)).take(l - 1));
    coeffs.push(rat_int(1));
    let p = PolyQ::from_coeffs(coeffs);
    let distinct = p.is_squarefree();
    (p, distinct)
}

/// The index partition and codimension bound extracted from a collision
/// system `rho2 rho1 pi (v) = lambda rho2 (v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodimAccount {
    /// Indices of `I2` forced to zero by seeding at `I2 ∩ K1` and walking
    /// forward along orbits of `pi` while the image stays in `I2`.
    pub i_domino: Vec<usize>,
    /// Fixed points of `pi` in the remainder of `I2`.
    pub i_fixed: Vec<usize>,
    /// Indices covered by complete cycles (length >= 2) of `pi` lying
    /// entirely in the remainder.
    pub i_cycles: Vec<usize>,
    /// Everything else in `I2`; contains no complete cycle of `pi`.
    pub i_incomplete: Vec<usize>,
    /// Sizes of the complete cycles counted in `i_cycles`.
    pub complete_cycle_sizes: Vec<usize>,
    pub codim_bound: usize,
}

impl CodimAccount {
    pub fn i2_len(&self) -> usize {
        self.i_domino.len() + self.i_fixed.len() + self.i_cycles.len() + self.i_incomplete.len()
    }
}

/// Runs the zero-forcing and cycle accounting for
/// `U(rho2 rho1 pi, rho2)` and returns the certified codimension bound
/// `|I_domino| + |I_fixed| + sum(|C_i| - 1) + max(|I_incomplete| - 1, 0)`.
///
/// The domino walk stops as soon as the image of a zeroed index leaves
/// `I2`: an index outside `I2` has no equation attached, so nothing forces
/// it to zero and the forcing chain is broken regardless of whether the
/// index is kept by `rho1`. Signs never enter the accounting; they move
/// eigenvalues around without changing eigenspace dimensions.
pub fn codim_account(
    pi: &SignedPermutation,
    rho1: &CoordinateProjection,
    rho2: &CoordinateProjection,
) -> Result<CodimAccount, PermError> {
    let m = pi.size();
    if rho1.size() != m || rho2.size() != m {
        return Err(PermError::SizeMismatch {
            perm: m,
            rho1: rho1.size(),
            rho2: rho2.size(),
        });
    }

    let in_i2 = |i: usize| rho2.keeps(i);
    let in_k1 = |i: usize| !rho1.keeps(i);

    // (1) domino: seeds in ascending order; forward closure along pi-orbits
    // restricted to I2. The result is order-independent (it is the closure
    // of the seed set under one monotone rule).
    let mut zeroed = vec![false; m];
    let mut worklist: Vec<usize> = rho2.kept().iter().copied().filter(|&i| in_k1(i)).collect();
    for &s in &worklist {
        zeroed[s] = true;
    }
    while let Some(j) = worklist.pop() {
        let next = pi.image(j);
        if in_i2(next) && !zeroed[next] {
            zeroed[next] = true;
            worklist.push(next);
        }
    }
    let i_domino: Vec<usize> = (0..m).filter(|&i| zeroed[i]).collect();

    // (2) fixed points of pi in I2 \ I_domino
    let i_fixed: Vec<usize> = rho2
        .kept()
        .iter()
        .copied()
        .filter(|&i| !zeroed[i] && pi.image(i) == i)
        .collect();

    // (3) complete cycles of length >= 2 inside the remaining set
    let remaining = |i: usize| in_i2(i) && !zeroed[i] && !i_fixed.contains(&i);
    let mut i_cycles = Vec::new();
    let mut complete_cycle_sizes = Vec::new();
    for orbit in cycle_decomposition(pi).cycles {
        if orbit.len() >= 2 && orbit.iter().all(|&i| remaining(i)) {
            complete_cycle_sizes.push(orbit.len());
            i_cycles.extend(orbit);
        }
    }
    i_cycles.sort_unstable();

    // (4) the residue
    let i_incomplete: Vec<usize> = rho2
        .kept()
        .iter()
        .copied()
        .filter(|&i| remaining(i) && i_cycles.binary_search(&i).is_err())
        .collect();

    let codim_bound = i_domino.len()
        + i_fixed.len()
        + complete_cycle_sizes.iter().map(|s| s - 1).sum::<usize>()
        + i_incomplete.len().saturating_sub(1);

    let account = CodimAccount {
        i_domino,
        i_fixed,
        i_cycles,
        i_incomplete,
        complete_cycle_sizes,
        codim_bound,
    };
    debug_assert_eq!(account.i2_len(), rho2.rank());
    debug_assert!(account.codim_bound >= rho2.rank() / 2);
    Ok(account)
}

/// Dimension bound `m - codim_bound` for the collision locus; always at
/// most `m - floor(rank(rho2) / 2)`.
pub fn theorem2_bound(
    pi: &SignedPermutation,
    rho1: &CoordinateProjection,
    rho2: &CoordinateProjection,
) -> Result<usize, PermError> {
    let account = codim_account(pi, rho1, rho2)?;
    let m = pi.size();
    let bound = m - account.codim_bound;
    debug_assert!(bound <= m - rho2.rank() / 2);
    Ok(bound)
}
