//! Desk-scale ground truth: instance generation and the exhaustive
//! brute-force oracle.
//!
//! The oracle enumerates every transformation pair in a class and solves the
//! collision system `[T1 A | -T2 A] xi = 0` exactly. A claim holds when the
//! null space lies in the diagonal `xi1 = xi2` (plain mode) or in the union
//! of the diagonal and antidiagonal (plus-minus mode). The hot loop runs a
//! fraction-free integer reduction; any hit or overflow is re-derived with
//! arbitrary-precision rationals before it is reported.

use crate::certify::SignMode;
use crate::exactalg::{rat_int, EchelonWorkspace, Rational, RationalMatrix};
use crate::permcodim::PermError;
use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Default ceiling on the number of collision solves in one oracle run.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error)]
pub enum SensingError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("could not sample a full-rank subspace in {attempts} attempts")]
    RankSamplingFailed { attempts: usize },
    #[error("enumeration needs {required} collision solves, budget is {budget}")]
    BudgetExceeded { required: u64, budget: u64 },
    #[error("invalid instance: {0}")]
    BadInstance(String),
}

/// The transformation class the oracle enumerates.
#[derive(Clone, Debug)]
pub enum TransformClass {
    /// All pairs of plain permutations.
    Perm,
    /// All pairs of permutations, signs sampled per run.
    SignedPerm,
    /// Projections of rank at least `r1` (resp. `r2`) composed with
    /// permutations; signs sampled when the mode allows them.
    ProjPerm { r1: usize, r2: usize },
    /// A single fixed pair of endomorphisms.
    EndoPair {
        t1: RationalMatrix,
        t2: RationalMatrix,
    },
}

#[derive(Clone, Debug)]
pub struct SensingInstance {
    pub m: usize,
    pub n: usize,
    /// `m x n` basis of the sampled subspace, full column rank.
    pub v_basis: RationalMatrix,
    pub class_spec: TransformClass,
    pub sign_mode: SignMode,
}

impl SensingInstance {
    pub fn new(
        m: usize,
        n: usize,
        v_basis: RationalMatrix,
        class_spec: TransformClass,
        sign_mode: SignMode,
    ) -> Result<Self, SensingError> {
        if v_basis.rows() != m || v_basis.cols() != n {
            return Err(SensingError::BadInstance(format!(
                "subspace basis must be {m}x{n}, got {}x{}",
                v_basis.rows(),
                v_basis.cols()
            )));
        }
        if v_basis.rank() != n {
            return Err(SensingError::BadInstance(
                "subspace basis must have full column rank".into(),
            ));
        }
        match &class_spec {
            TransformClass::ProjPerm { r1, r2 } => {
                if *r2 < 2 * n || *r1 < n {
                    return Err(SensingError::BadInstance(format!(
                        "projection ranks must satisfy r1 >= n and r2 >= 2n, got r1 = {r1}, r2 = {r2}"
                    )));
                }
                if *r1 > m || *r2 > m {
                    return Err(SensingError::BadInstance(
                        "projection ranks cannot exceed m".into(),
                    ));
                }
            }
            TransformClass::EndoPair { t1, t2 } => {
                if t1.rows() != m || !t1.is_square() || t2.rows() != m || !t2.is_square() {
                    return Err(SensingError::BadInstance(
                        "endomorphism pair must be square of size m".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(Self {
            m,
            n,
            v_basis,
            class_spec,
            sign_mode,
        })
    }
}

/// One exact counterexample, re-verified before it is stored.
#[derive(Clone, Debug)]
pub struct Violation {
    pub tau1: String,
    pub tau2: String,
    pub v1: Vec<Rational>,
    pub v2: Vec<Rational>,
}

#[derive(Clone, Debug, Default)]
pub struct CollisionReport {
    pub violations: Vec<Violation>,
    pub pairs_checked: u64,
}

#[derive(Clone, Debug)]
pub struct OracleOptions {
    /// Maximum number of collision solves; exceeding it is an error, never a
    /// silent truncation.
    pub budget: u64,
    /// Number of sampled sign-pattern pairs for signed classes.
    pub sign_samples: usize,
    pub seed: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            sign_samples: 16,
            seed: 0,
        }
    }
}

/// Random integer-entry subspace basis: `m x n`, entries uniform in
/// `[-bound, bound]`, resampled until the column rank is full. Deterministic
/// per seed.
pub fn random_subspace(
    m: usize,
    n: usize,
    bound: i64,
    seed: u64,
) -> Result<RationalMatrix, SensingError> {
    assert!(n <= m, "subspace dimension exceeds ambient dimension");
    assert!(bound >= 1, "entry bound must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ATTEMPTS: usize = 64;
    for _ in 0..ATTEMPTS {
        let a = RationalMatrix::from_fn(m, n, |_, _| rat_int(rng.gen_range(-bound..=bound)));
        if a.rank() == n {
            return Ok(a);
        }
    }
    Err(SensingError::RankSamplingFailed { attempts: ATTEMPTS })
}

/// Solve the collision system for one pair and return every identification
/// failure as `(v1, v2) = (A xi1, A xi2)`. The check is at the coordinate
/// level: for a full-column-rank `A` this coincides with the subspace-level
/// statement.
pub fn collision_solve(
    t1: &RationalMatrix,
    t2: &RationalMatrix,
    a: &RationalMatrix,
    sign_mode: SignMode,
) -> Vec<(Vec<Rational>, Vec<Rational>)> {
    let n = a.cols();
    let system = t1.matmul(a).hstack(&t2.matmul(a).scale(&-Rational::one()));
    let kernel = system.kernel_basis();
    let split = |col: usize| -> (Vec<Rational>, Vec<Rational>) {
        let xi1: Vec<Rational> = (0..n).map(|j| kernel.at(j, col).clone()).collect();
        let xi2: Vec<Rational> = (0..n).map(|j| kernel.at(n + j, col).clone()).collect();
        (xi1, xi2)
    };
    let in_diag = |xi: &(Vec<Rational>, Vec<Rational>)| xi.0 == xi.1;
    let in_anti = |xi: &(Vec<Rational>, Vec<Rational>)| {
        xi.0.iter().zip(&xi.1).all(|(x, y)| *x == -y.clone())
    };

    let cols: Vec<(Vec<Rational>, Vec<Rational>)> = (0..kernel.cols()).map(split).collect();
    let mut bad: Vec<(Vec<Rational>, Vec<Rational>)> = Vec::new();
    match sign_mode {
        SignMode::Plain => {
            for xi in &cols {
                if !in_diag(xi) {
                    bad.push(xi.clone());
                }
            }
        }
        SignMode::PlusMinus => {
            let all_diag = cols.iter().all(in_diag);
            let all_anti = cols.iter().all(in_anti);
            if !all_diag && !all_anti {
                // a subspace inside the union of two subspaces lies in one
                // of them; otherwise a violating vector exists, possibly as
                // a sum of two basis vectors from different halves
                for xi in &cols {
                    if !in_diag(xi) && !in_anti(xi) {
                        bad.push(xi.clone());
                    }
                }
                if bad.is_empty() {
                    let d = cols.iter().find(|xi| in_diag(xi) && !in_anti(xi));
                    let an = cols.iter().find(|xi| in_anti(xi) && !in_diag(xi));
                    if let (Some(d), Some(an)) = (d, an) {
                        let sum = (
                            d.0.iter().zip(&an.0).map(|(x, y)| x + y).collect::<Vec<_>>(),
                            d.1.iter().zip(&an.1).map(|(x, y)| x + y).collect::<Vec<_>>(),
                        );
                        debug_assert!(!in_diag(&sum) && !in_anti(&sum));
                        bad.push(sum);
                    }
                }
            }
        }
    }

    bad.into_iter()
        .map(|(xi1, xi2)| {
            let v1 = a.mul_vec(&xi1);
            let v2 = a.mul_vec(&xi2);
            debug_assert_eq!(t1.mul_vec(&v1), t2.mul_vec(&v2));
            (v1, v2)
        })
        .collect()
}

/// Point-level check: for the fixed point `v = A xi`, every solution `v'` of
/// `t1(v) = t2(v')` inside the subspace must equal `v` (or `±v` in
/// plus-minus mode). Returns the violations `(v, v')`.
pub fn point_collision(
    t1: &RationalMatrix,
    t2: &RationalMatrix,
    a: &RationalMatrix,
    xi: &[Rational],
    sign_mode: SignMode,
) -> Vec<(Vec<Rational>, Vec<Rational>)> {
    let v = a.mul_vec(xi);
    let b = RationalMatrix::from_columns(&[t1.mul_vec(&v)]).expect("single column");
    let t2a = t2.matmul(a);
    let Some(particular) = t2a.solve(&b) else {
        return Vec::new();
    };
    let xi0 = particular.column(0);
    let kernel = t2a.kernel_basis();
    let neg_xi: Vec<Rational> = xi.iter().map(|x| -x.clone()).collect();
    let allowed: Vec<&[Rational]> = match sign_mode {
        SignMode::Plain => vec![xi],
        SignMode::PlusMinus => vec![xi, &neg_xi],
    };
    let mut solutions = vec![xi0.clone()];
    if kernel.cols() > 0 {
        // the solution set is a line or larger; list three points on the
        // first kernel direction, at most two can be allowed
        let k0 = kernel.column(0);
        for scale in [1i64, 2] {
            solutions.push(
                xi0.iter()
                    .zip(&k0)
                    .map(|(x, k)| x + &(k * &rat_int(scale)))
                    .collect(),
            );
        }
    }
    solutions
        .into_iter()
        .filter(|sol| !allowed.iter().any(|ok| ok == &sol.as_slice()))
        .take(1)
        .map(|sol| {
            let v2 = a.mul_vec(&sol);
            debug_assert_eq!(t1.mul_vec(&v), t2.mul_vec(&v2));
            (v.clone(), v2)
        })
        .collect()
}

/// All kept-index sets of size at least `min_rank`, in ascending bitmask
/// order.
pub fn kept_sets(m: usize, min_rank: usize) -> Vec<Vec<usize>> {
    (0u32..(1u32 << m))
        .filter(|mask| mask.count_ones() as usize >= min_rank)
        .map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

/// All image arrays of the symmetric group on `m` points, lexicographic.
pub fn all_permutations(m: usize) -> Vec<Vec<usize>> {
    (0..m).permutations(m).collect()
}

/// Matrix of a signed coordinate projection composed with a permutation:
/// coordinate `i` of the output is `sign[i] * x[perm^{-1}(i)]` when `i` is
/// kept and zero otherwise.
pub fn proj_perm_matrix(
    m: usize,
    perm: &[usize],
    signs: &[i8],
    kept: &[usize],
) -> RationalMatrix {
    let keep: Vec<bool> = {
        let mut k = vec![false; m];
        for &i in kept {
            k[i] = true;
        }
        k
    };
    let mut out = RationalMatrix::zeros(m, m);
    for j in 0..m {
        let i = perm[j];
        if keep[i] {
            out.set(i, j, rat_int(signs[i] as i64));
        }
    }
    out
}

fn describe(perm: &[usize], signs: &[i8], kept: &[usize], m: usize) -> String {
    let mut s = format!("perm={perm:?}");
    if signs.iter().any(|&x| x == -1) {
        let compact: String = signs.iter().map(|&x| if x == 1 { '+' } else { '-' }).collect();
        s.push_str(&format!(" signs={compact}"));
    }
    if kept.len() != m {
        s.push_str(&format!(" kept={kept:?}"));
    }
    s
}

/// Integer form of the subspace basis: columns scaled by the common
/// denominator (which leaves every collision verdict unchanged), plus the
/// largest absolute entry for overflow gating.
fn integer_basis(a: &RationalMatrix) -> (Vec<Vec<i128>>, Option<u128>) {
    let mut lcm = BigInt::one();
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            lcm = lcm.lcm(a.at(r, c).denom());
        }
    }
    let mut max_abs: BigInt = BigInt::zero();
    let mut rows = Vec::with_capacity(a.rows());
    for r in 0..a.rows() {
        let mut row = Vec::with_capacity(a.cols());
        for c in 0..a.cols() {
            let v = a.at(r, c).numer() * (&lcm / a.at(r, c).denom());
            if v.abs() > max_abs {
                max_abs = v.abs();
            }
            row.push(v);
        }
        rows.push(row);
    }
    let as_i128: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|row| row.iter().map(|v| v.to_i128()).collect())
        .collect();
    match as_i128 {
        Some(int_rows) => (int_rows, max_abs.to_u128()),
        None => (Vec::new(), None),
    }
}

/// Conservative overflow gate: entries of any reduced row stay below
/// products of `cols+1` pivots, each bounded by a Hadamard-style term.
fn int_path_safe(max_abs: u128, m: usize, cols: usize) -> bool {
    let bits_entry = 128 - max_abs.leading_zeros() as usize;
    let bits_dim = usize::BITS as usize - m.leading_zeros() as usize;
    (bits_entry + bits_dim) * (cols + 1) < 110
}

struct PairTask<'a> {
    a_int: &'a [Vec<i128>],
    a_rat: &'a RationalMatrix,
    m: usize,
    n: usize,
    sign_mode: SignMode,
    use_int: bool,
}

/// Per-worker reusable buffers; a steady-state check allocates nothing.
#[derive(Default)]
struct CheckScratch {
    ws: EchelonWorkspace,
    row: Vec<i128>,
}

impl PairTask<'_> {
    /// Check one transformation pair. Returns the violations.
    #[allow(clippy::too_many_arguments)]
    fn check(
        &self,
        scratch: &mut CheckScratch,
        perm1: &[usize],
        inv1: &[usize],
        signs1: &[i8],
        keep1: &[bool],
        kept1: &[usize],
        perm2: &[usize],
        inv2: &[usize],
        signs2: &[i8],
        keep2: &[bool],
        kept2: &[usize],
    ) -> Vec<Violation> {
        let (m, n) = (self.m, self.n);
        let clean = if self.use_int {
            scratch.ws.reset(2 * n);
            scratch.row.resize(2 * n, 0);
            let mut overflow = false;
            for i in 0..m {
                let row = &mut scratch.row;
                row.fill(0);
                if keep1[i] {
                    let src = &self.a_int[inv1[i]];
                    let s = signs1[i] as i128;
                    for j in 0..n {
                        row[j] = s * src[j];
                    }
                }
                if keep2[i] {
                    let src = &self.a_int[inv2[i]];
                    let s = -(signs2[i] as i128);
                    for j in 0..n {
                        row[n + j] = s * src[j];
                    }
                }
                if scratch.ws.insert(row).is_none() {
                    overflow = true;
                    break;
                }
            }
            if overflow {
                None
            } else {
                let mut contains_all = |anti: bool| -> Option<bool> {
                    for j in 0..n {
                        let row = &mut scratch.row;
                        row.fill(0);
                        row[j] = 1;
                        row[n + j] = if anti { 1 } else { -1 };
                        if !scratch.ws.contains(row)? {
                            return Some(false);
                        }
                    }
                    Some(true)
                };
                match self.sign_mode {
                    SignMode::Plain => contains_all(false),
                    SignMode::PlusMinus => match (contains_all(false), contains_all(true)) {
                        (Some(d), Some(a)) => Some(d || a),
                        _ => None,
                    },
                }
            }
        } else {
            None
        };
        match clean {
            Some(true) => Vec::new(),
            // violation or overflow: derive the exact pairs
            _ => {
                let t1 = proj_perm_matrix(m, perm1, signs1, kept1);
                let t2 = proj_perm_matrix(m, perm2, signs2, kept2);
                collision_solve(&t1, &t2, self.a_rat, self.sign_mode)
                    .into_iter()
                    .map(|(v1, v2)| Violation {
                        tau1: describe(perm1, signs1, kept1, m),
                        tau2: describe(perm2, signs2, kept2, m),
                        v1,
                        v2,
                    })
                    .collect()
            }
        }
    }
}

fn inverse_of(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (j, &i) in perm.iter().enumerate() {
        inv[i] = j;
    }
    inv
}

/// Enumerate every transformation pair in the class and solve each collision
/// system exactly. The budget check happens before any enumeration; an
/// exhaustive run is never silently truncated.
pub fn exhaustive_oracle(
    inst: &SensingInstance,
    opts: &OracleOptions,
) -> Result<CollisionReport, SensingError> {
    let m = inst.m;
    match &inst.class_spec {
        TransformClass::EndoPair { t1, t2 } => {
            if 1 > opts.budget {
                return Err(SensingError::BudgetExceeded {
                    required: 1,
                    budget: opts.budget,
                });
            }
            let violations = collision_solve(t1, t2, &inst.v_basis, inst.sign_mode)
                .into_iter()
                .map(|(v1, v2)| Violation {
                    tau1: "t1".into(),
                    tau2: "t2".into(),
                    v1,
                    v2,
                })
                .collect();
            Ok(CollisionReport {
                violations,
                pairs_checked: 1,
            })
        }
        TransformClass::Perm | TransformClass::SignedPerm | TransformClass::ProjPerm { .. } => {
            let (kept1, kept2) = match &inst.class_spec {
                TransformClass::ProjPerm { r1, r2 } => (kept_sets(m, *r1), kept_sets(m, *r2)),
                _ => (vec![(0..m).collect::<Vec<usize>>()], vec![(0..m).collect()]),
            };
            let signed_class = matches!(
                inst.class_spec,
                TransformClass::SignedPerm | TransformClass::ProjPerm { .. }
            ) && inst.sign_mode == SignMode::PlusMinus;
            let sign_draws = if signed_class { opts.sign_samples.max(1) } else { 1 };

            let perms = all_permutations(m);
            let inverses: Vec<Vec<usize>> = perms.iter().map(|p| inverse_of(p)).collect();
            let required: u64 = (perms.len() as u64)
                * (perms.len() as u64)
                * (kept1.len() as u64)
                * (kept2.len() as u64)
                * (sign_draws as u64);
            if required > opts.budget {
                return Err(SensingError::BudgetExceeded {
                    required,
                    budget: opts.budget,
                });
            }

            let (a_int, max_abs) = integer_basis(&inst.v_basis);
            let use_int = matches!(max_abs, Some(ma) if int_path_safe(ma.max(1), m, 2 * inst.n));
            let task = PairTask {
                a_int: &a_int,
                a_rat: &inst.v_basis,
                m,
                n: inst.n,
                sign_mode: inst.sign_mode,
                use_int,
            };

            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let all_plus = vec![1i8; m];
            let mut violations: Vec<Violation> = Vec::new();
            for _draw in 0..sign_draws {
                let (signs1, signs2) = if signed_class {
                    let s1: Vec<i8> =
                        (0..m).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
                    let s2: Vec<i8> =
                        (0..m).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
                    (s1, s2)
                } else {
                    (all_plus.clone(), all_plus.clone())
                };
                for k1 in &kept1 {
                    let mut keep1 = vec![false; m];
                    for &i in k1 {
                        keep1[i] = true;
                    }
                    for k2 in &kept2 {
                        let mut keep2 = vec![false; m];
                        for &i in k2 {
                            keep2[i] = true;
                        }
                        // parallel over the first permutation, merged in
                        // deterministic order
                        let mut found: Vec<Violation> = perms
                            .par_iter()
                            .enumerate()
                            .map(|(i1, p1)| {
                                let mut local = Vec::new();
                                let mut scratch = CheckScratch::default();
                                for (i2, p2) in perms.iter().enumerate() {
                                    local.extend(task.check(
                                        &mut scratch,
                                        p1,
                                        &inverses[i1],
                                        &signs1,
                                        &keep1,
                                        k1,
                                        p2,
                                        &inverses[i2],
                                        &signs2,
                                        &keep2,
                                        k2,
                                    ));
                                }
                                local
                            })
                            .flatten_iter()
                            .collect();
                        violations.append(&mut found);
                    }
                }
            }
            Ok(CollisionReport {
                violations,
                pairs_checked: required,
            })
        }
    }
}

/// Validate a certified pair claim: for `v_count` seeded subspaces the
/// collision system must be clean. A violating sample is resampled a few
/// times before it counts — bad subspaces form a measure-zero locus, so a
/// persistent violation is a genuine soundness failure.
pub fn validate_pair_uniqueness(
    t1: &RationalMatrix,
    t2: &RationalMatrix,
    n: usize,
    sign_mode: SignMode,
    v_count: usize,
    bound: i64,
    seed: u64,
) -> Result<(), Violation> {
    let m = t1.rows();
    const RESAMPLES: usize = 5;
    for k in 0..v_count {
        let mut last: Option<(Vec<Rational>, Vec<Rational>)> = None;
        let mut clean = false;
        for attempt in 0..RESAMPLES {
            let sub_seed = seed
                .wrapping_add(k as u64)
                .wrapping_mul(0x9e3779b97f4a7c15)
                .wrapping_add(attempt as u64);
            let Ok(a) = random_subspace(m, n, bound, sub_seed) else {
                continue;
            };
            match collision_solve(t1, t2, &a, sign_mode).into_iter().next() {
                None => {
                    clean = true;
                    break;
                }
                Some(v) => last = Some(v),
            }
        }
        if !clean {
            let (v1, v2) = last.expect("a failing attempt recorded its violation");
            return Err(Violation {
                tau1: "t1".into(),
                tau2: "t2".into(),
                v1,
                v2,
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// instance generation

/// Single Jordan block.
pub fn jordan_block(lambda: &Rational, d: usize) -> RationalMatrix {
    RationalMatrix::from_fn(d, d, |r, c| {
        if r == c {
            lambda.clone()
        } else if c == r + 1 {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// Block diagonal assembly.
pub fn block_diag(blocks: &[RationalMatrix]) -> RationalMatrix {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut m = RationalMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for r in 0..b.rows() {
            for c in 0..b.cols() {
                m.set(off + r, off + c, b.at(r, c).clone());
            }
        }
        off += b.rows();
    }
    m
}

/// Random unimodular integer matrix built from shear operations;
/// determinant is exactly `1`.
pub fn random_unimodular(m: usize, seed: u64) -> RationalMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = RationalMatrix::identity(m);
    if m < 2 {
        return s;
    }
    for _ in 0..2 * m {
        let i = rng.gen_range(0..m);
        let mut j = rng.gen_range(0..m);
        while j == i {
            j = rng.gen_range(0..m);
        }
        let coeff = rat_int(rng.gen_range(-2..=2i64));
        // row_i += coeff * row_j
        for c in 0..m {
            let v = s.at(i, c) + &(&coeff * s.at(j, c));
            s.set(i, c, v);
        }
    }
    debug_assert_eq!(s.determinant().unwrap(), Rational::one());
    s
}

/// A random Jordan-form matrix conjugated by a random unimodular matrix:
/// returns the conjugated matrix together with the block structure
/// `(eigenvalue, block dimension)` that generated it.
pub fn random_conjugated_jordan(
    m: usize,
    eigen_pool: &[i64],
    max_block: usize,
    seed: u64,
) -> (RationalMatrix, Vec<(Rational, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks: Vec<(Rational, usize)> = Vec::new();
    let mut remaining = m;
    while remaining > 0 {
        let d = rng.gen_range(1..=max_block.min(remaining));
        let ev = rat_int(eigen_pool[rng.gen_range(0..eigen_pool.len())]);
        blocks.push((ev, d));
        remaining -= d;
    }
    let j = block_diag(
        &blocks
            .iter()
            .map(|(ev, d)| jordan_block(ev, *d))
            .collect::<Vec<_>>(),
    );
    let s = random_unimodular(m, seed.wrapping_add(0x5DEECE66D));
    let t = s.matmul(&j).matmul(&s.inverse().expect("unimodular"));
    (t, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_subspace_is_deterministic_and_full_rank() {
        let a = random_subspace(4, 2, 10, 7).unwrap();
        let b = random_subspace(4, 2, 10, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rank(), 2);
        assert_eq!(random_subspace(3, 3, 5, 1).unwrap().rank(), 3);
    }

    #[test]
    fn collision_identity_pair_is_clean() {
        let id = RationalMatrix::identity(4);
        let a = random_subspace(4, 2, 10, 3).unwrap();
        assert!(collision_solve(&id, &id, &a, SignMode::Plain).is_empty());
    }

    #[test]
    fn collision_negated_identity_needs_plus_minus() {
        let id = RationalMatrix::identity(4);
        let neg = id.scale(&rat_int(-1));
        let a = random_subspace(4, 2, 10, 4).unwrap();
        assert!(collision_solve(&id, &neg, &a, SignMode::PlusMinus).is_empty());
        assert!(!collision_solve(&id, &neg, &a, SignMode::Plain).is_empty());
    }

    #[test]
    fn collision_zero_target_violates() {
        let id = RationalMatrix::identity(3);
        let zero = RationalMatrix::zeros(3, 3);
        let a = random_subspace(3, 1, 10, 5).unwrap();
        let viols = collision_solve(&id, &zero, &a, SignMode::Plain);
        assert!(!viols.is_empty());
        // v1 is forced to zero, v2 is free
        let (v1, v2) = &viols[0];
        assert!(v1.iter().all(|x| x.is_zero()));
        assert!(v2.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn point_collision_detects_and_accepts() {
        let t1 = RationalMatrix::identity(3);
        let t2 = RationalMatrix::diagonal(&[rat_int(1), rat_int(2), rat_int(3)]);
        let a = random_subspace(3, 1, 7, 11).unwrap();
        let xi = vec![rat_int(1)];
        // generically no v' solves t1(v) = t2(v'), which counts as clean
        assert!(point_collision(&t1, &t2, &a, &xi, SignMode::Plain).is_empty());

        // equal maps: v' = v is the unique solution, clean as well
        assert!(point_collision(&t1, &t1, &a, &xi, SignMode::Plain).is_empty());

        // t2 = 2 * t1: the solution v' = v/2 differs from v
        let double = t1.scale(&rat_int(2));
        let viols = point_collision(&t1, &double, &a, &xi, SignMode::Plain);
        assert_eq!(viols.len(), 1);
    }

    #[test]
    fn oracle_perm_class_small_clean() {
        // m = 4, n = 2, plain permutations, generic subspace
        let a = random_subspace(4, 2, 10, 17).unwrap();
        let inst =
            SensingInstance::new(4, 2, a, TransformClass::Perm, SignMode::Plain).unwrap();
        let report = exhaustive_oracle(&inst, &OracleOptions::default()).unwrap();
        assert_eq!(report.pairs_checked, 576);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn oracle_detects_non_generic_subspace() {
        // V = span(e1 - e2) in m = 2 is a non-generic line: the swap negates
        // it, so pi1 = swap, pi2 = id admit v1 = -v2 != v2 and plain mode
        // must report the pair. Plus-minus mode forgives exactly this.
        let a = RationalMatrix::from_int_rows(&[vec![1], vec![-1]]);
        let inst =
            SensingInstance::new(2, 1, a.clone(), TransformClass::Perm, SignMode::Plain).unwrap();
        let report = exhaustive_oracle(&inst, &OracleOptions::default()).unwrap();
        assert_eq!(report.pairs_checked, 4);
        assert!(!report.violations.is_empty());
        for v in &report.violations {
            assert_ne!(v.v1, v.v2);
        }
        let pm = SensingInstance::new(2, 1, a, TransformClass::Perm, SignMode::PlusMinus).unwrap();
        let report = exhaustive_oracle(&pm, &OracleOptions::default()).unwrap();
        assert!(report.violations.is_empty());
    }

    #[test]
    fn oracle_budget_is_checked_before_running() {
        let a = random_subspace(4, 2, 10, 23).unwrap();
        let inst =
            SensingInstance::new(4, 2, a, TransformClass::Perm, SignMode::Plain).unwrap();
        let opts = OracleOptions {
            budget: 100,
            ..OracleOptions::default()
        };
        assert!(matches!(
            exhaustive_oracle(&inst, &opts),
            Err(SensingError::BudgetExceeded { required: 576, .. })
        ));
    }

    #[test]
    fn int_and_rational_paths_agree() {
        // brute comparison on small signed projected instances
        let m = 3;
        let perms = all_permutations(m);
        let a = random_subspace(m, 1, 6, 9).unwrap();
        let ksets = kept_sets(m, 1);
        let signs = [
            vec![1i8, 1, 1],
            vec![-1i8, 1, 1],
            vec![1i8, -1, -1],
        ];
        let mask = |kept: &[usize]| -> Vec<bool> {
            let mut keep = vec![false; m];
            for &i in kept {
                keep[i] = true;
            }
            keep
        };
        let task_int = |use_int: bool| -> Vec<usize> {
            let (a_int, max_abs) = integer_basis(&a);
            let task = PairTask {
                a_int: &a_int,
                a_rat: &a,
                m,
                n: 1,
                sign_mode: SignMode::PlusMinus,
                use_int: use_int && max_abs.is_some(),
            };
            let mut scratch = CheckScratch::default();
            let mut counts = Vec::new();
            for s1 in &signs {
                for k1 in &ksets {
                    for (i1, p1) in perms.iter().enumerate() {
                        for (i2, p2) in perms.iter().enumerate() {
                            let k2 = &ksets[(i1 * 7 + i2) % ksets.len()];
                            let v = task.check(
                                &mut scratch,
                                p1,
                                &inverse_of(p1),
                                s1,
                                &mask(k1),
                                k1,
                                p2,
                                &inverse_of(p2),
                                &signs[(i1 + i2) % signs.len()],
                                &mask(k2),
                                k2,
                            );
                            counts.push(v.len());
                        }
                    }
                }
            }
            counts
        };
        assert_eq!(task_int(true), task_int(false));
    }

    #[test]
    fn validate_pair_uniqueness_passes_identity() {
        let id = RationalMatrix::identity(4);
        assert!(validate_pair_uniqueness(&id, &id, 2, SignMode::Plain, 5, 50, 42).is_ok());
    }

    #[test]
    fn rank_floor_violations_are_findable_below_2n() {
        // when the second projection keeps fewer than 2n coordinates the
        // identification can fail even for generic subspaces: tau1 keeps
        // coordinate 0, tau2 reads coordinate 1 into slot 0. This probes the
        // sharp side of the rank requirement; the class constructor itself
        // refuses such instances for enumeration.
        let t1 = RationalMatrix::from_int_rows(&[vec![1, 0], vec![0, 0]]);
        let t2 = RationalMatrix::from_int_rows(&[vec![0, 1], vec![0, 0]]);
        let mut found = false;
        for seed in 0..8u64 {
            let a = random_subspace(2, 1, 10, seed).unwrap();
            if !collision_solve(&t1, &t2, &a, SignMode::Plain).is_empty() {
                found = true;
                break;
            }
        }
        assert!(found, "searched instances should exhibit a violation");
        // and the enumeration guard refuses the class outright
        let a = random_subspace(2, 1, 10, 0).unwrap();
        assert!(SensingInstance::new(
            2,
            1,
            a,
            TransformClass::ProjPerm { r1: 1, r2: 1 },
            SignMode::Plain
        )
        .is_err());
    }

    #[test]
    fn conjugated_jordan_keeps_structure() {
        let (t, blocks) = random_conjugated_jordan(5, &[1, 2, 3], 3, 99);
        let total: usize = blocks.iter().map(|(_, d)| d).sum();
        assert_eq!(total, 5);
        assert_eq!(t.rows(), 5);
        // trace is the sum of eigenvalues with multiplicity
        let mut trace = Rational::zero();
        for i in 0..5 {
            trace += t.at(i, i);
        }
        let expect: Rational = blocks
            .iter()
            .map(|(ev, d)| ev * &rat_int(*d as i64))
            .fold(Rational::zero(), |acc, x| acc + x);
        assert_eq!(trace, expect);
    }
}
