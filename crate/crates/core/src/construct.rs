//! Constructive witness subspaces: given an endomorphism whose eigenspace
//! dimensions are small enough, build an explicit `n`-dimensional `V` with
//! `dim(V + t(V)) = 2n`, certified by the exact rank of `[A | TA]`.
//!
//! Three entry points cover three hypothesis regimes on an `m x m` matrix
//! with rational spectrum:
//!
//! * [`construct_boundary`]: `m = 2n` and some eigenvalue has geometric
//!   multiplicity exactly `n` — pairs the `n` eigenvectors with the
//!   remaining Jordan vectors.
//! * [`construct_half`]: `m = 2n` and every multiplicity is at most `n` —
//!   peels off 2-dimensional complements and recurses.
//! * [`construct_general`]: `m >= 2n` and every multiplicity is at most
//!   `m - n` — truncates cyclic summands down to an invariant `2n`-space and
//!   delegates to the half case.

use crate::exactalg::{format_rational, Rational, RationalMatrix};
use crate::structure::{rational_jordan_decomposition, vec_lex_cmp, CyclicSummand, StructureError};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("boundary construction requires m = 2n, got m = {m}, n = {n}")]
    BoundaryDimension { m: usize, n: usize },
    #[error("construction requires m >= 2n, got m = {m}, n = {n}")]
    GeneralDimension { m: usize, n: usize },
    #[error("no rational eigenvalue has geometric multiplicity exactly {n}")]
    NoPivotEigenvalue { n: usize },
    #[error("eigenvalue {eigenvalue} has geometric multiplicity {multiplicity} > {limit}")]
    MultiplicityTooLarge {
        eigenvalue: String,
        multiplicity: usize,
        limit: usize,
    },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
}

/// An explicit witness basis together with the rank of `[A | TA]`.
#[derive(Clone, Debug)]
pub struct WitnessSubspace {
    /// `m x n` basis of `V`, full column rank.
    pub basis: RationalMatrix,
    /// Exact rank of `[A | TA]`; `2n` on success.
    pub certificate_rank: usize,
}

/// Exact rank of `[A | TA]`.
pub fn verify_witness(t: &RationalMatrix, a: &RationalMatrix) -> Result<usize, ConstructError> {
    if !t.is_square() {
        return Err(ConstructError::ShapeMismatch(format!(
            "transformation must be square, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    if a.rows() != t.rows() {
        return Err(ConstructError::ShapeMismatch(format!(
            "basis has {} rows but the transformation acts on {} coordinates",
            a.rows(),
            t.rows()
        )));
    }
    if a.cols() == 0 {
        return Ok(0);
    }
    Ok(a.hstack(&t.matmul(a)).rank())
}

/// Boundary regime: `m = 2n`, some rational eigenvalue with geometric
/// multiplicity exactly `n`, rational spectrum.
pub fn construct_boundary(t: &RationalMatrix, n: usize) -> Result<WitnessSubspace, ConstructError> {
    let m = t.rows();
    if !t.is_square() || m != 2 * n {
        return Err(ConstructError::BoundaryDimension { m, n });
    }
    let summands = sorted_summands(rational_jordan_decomposition(t)?);
    let us = boundary_from_summands(&summands, n)?;
    finish(t, us, n)
}

/// Half regime: `m = 2n`, every eigenvalue has geometric multiplicity at
/// most `n`, rational spectrum.
pub fn construct_half(t: &RationalMatrix, n: usize) -> Result<WitnessSubspace, ConstructError> {
    let m = t.rows();
    if !t.is_square() || m != 2 * n {
        return Err(ConstructError::BoundaryDimension { m, n });
    }
    let summands = sorted_summands(rational_jordan_decomposition(t)?);
    check_multiplicity_limit(&summands, n)?;
    let us = half_from_summands(&summands, n)?;
    finish(t, us, n)
}

/// General regime: `m >= 2n`, every eigenvalue has geometric multiplicity at
/// most `m - n`, rational spectrum. Selects and truncates cyclic summands to
/// a `2n`-dimensional invariant subspace, then runs the half construction.
pub fn construct_general(t: &RationalMatrix, n: usize) -> Result<WitnessSubspace, ConstructError> {
    let m = t.rows();
    if !t.is_square() || m < 2 * n {
        return Err(ConstructError::GeneralDimension { m, n });
    }
    if n == 0 {
        return Ok(WitnessSubspace {
            basis: RationalMatrix::zeros(m, 0),
            certificate_rank: 0,
        });
    }
    let summands = sorted_summands(rational_jordan_decomposition(t)?);
    check_multiplicity_limit(&summands, m - n)?;
    let selected = select_invariant_2n(&summands, n, m)?;
    debug_assert_eq!(total_dim(&selected), 2 * n);
    let us = half_from_summands(&selected, n)?;
    finish(t, us, n)
}

fn finish(
    t: &RationalMatrix,
    us: Vec<Vec<Rational>>,
    n: usize,
) -> Result<WitnessSubspace, ConstructError> {
    if us.len() != n {
        return Err(ConstructError::InternalInvariant(format!(
            "built {} basis vectors, expected {n}",
            us.len()
        )));
    }
    let basis = RationalMatrix::from_columns(&us)
        .map_err(|e| ConstructError::InternalInvariant(e.to_string()))?;
    let certificate_rank = verify_witness(t, &basis)?;
    if certificate_rank != 2 * n {
        return Err(ConstructError::InternalInvariant(format!(
            "witness certifies rank {certificate_rank}, expected {}",
            2 * n
        )));
    }
    Ok(WitnessSubspace {
        basis,
        certificate_rank,
    })
}

fn total_dim(summands: &[CyclicSummand]) -> usize {
    summands.iter().map(|s| s.dimension()).sum()
}

/// Canonical order: eigenvalue ascending, dimension ascending, chain top
/// lexicographic. All constructions and their tie-breaks read from this.
fn sorted_summands(mut summands: Vec<CyclicSummand>) -> Vec<CyclicSummand> {
    summands.sort_by(|a, b| {
        a.eigenvalue
            .cmp(&b.eigenvalue)
            .then_with(|| a.dimension().cmp(&b.dimension()))
            .then_with(|| vec_lex_cmp(a.chain.last().unwrap(), b.chain.last().unwrap()))
    });
    summands
}

fn multiplicities(summands: &[CyclicSummand]) -> BTreeMap<Rational, usize> {
    let mut counts = BTreeMap::new();
    for s in summands {
        *counts.entry(s.eigenvalue.clone()).or_insert(0) += 1;
    }
    counts
}

fn check_multiplicity_limit(
    summands: &[CyclicSummand],
    limit: usize,
) -> Result<(), ConstructError> {
    for (ev, count) in multiplicities(summands) {
        if count > limit {
            return Err(ConstructError::MultiplicityTooLarge {
                eigenvalue: format_rational(&ev),
                multiplicity: count,
                limit,
            });
        }
    }
    Ok(())
}

fn vec_add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Truncate a chain to its first `keep` vectors (`w1..w_keep`), which stays
/// a valid invariant chain; `keep = 0` drops the summand.
fn truncate(summand: &CyclicSummand, keep: usize) -> Option<CyclicSummand> {
    debug_assert!(keep <= summand.dimension());
    if keep == 0 {
        return None;
    }
    Some(CyclicSummand {
        eigenvalue: summand.eigenvalue.clone(),
        chain: summand.chain[..keep].to_vec(),
    })
}

/// The boundary pairing on a summand list with total dimension `2n` and a
/// pivotal eigenvalue of multiplicity exactly `n`.
fn boundary_from_summands(
    summands: &[CyclicSummand],
    n: usize,
) -> Result<Vec<Vec<Rational>>, ConstructError> {
    if total_dim(summands) != 2 * n {
        return Err(ConstructError::InternalInvariant(
            "boundary pairing needs total dimension 2n".into(),
        ));
    }
    let counts = multiplicities(summands);
    let pivot = counts
        .iter()
        .find(|(_, &c)| c == n)
        .map(|(ev, _)| ev.clone())
        .ok_or(ConstructError::NoPivotEigenvalue { n })?;

    let lam: Vec<&CyclicSummand> = summands.iter().filter(|s| s.eigenvalue == pivot).collect();
    let others: Vec<&CyclicSummand> = summands.iter().filter(|s| s.eigenvalue != pivot).collect();
    let r = lam.iter().filter(|s| s.dimension() == 1).count();

    if r == 0 {
        // every pivotal summand is exactly 2-dimensional and nothing else
        // exists; the chain tops alone span a complement of their images
        if !others.is_empty() || lam.iter().any(|s| s.dimension() != 2) {
            return Err(ConstructError::InternalInvariant(
                "r = 0 forces n two-dimensional summands of a single eigenvalue".into(),
            ));
        }
        return Ok(lam.iter().map(|s| s.chain[1].clone()).collect());
    }

    // eigenvectors of the 1-dimensional pivotal summands, in canonical order
    let v: Vec<&Vec<Rational>> = lam[..r].iter().map(|s| &s.chain[0]).collect();
    let mut us: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut used = 0usize;
    for block in &lam[r..] {
        let d = block.dimension();
        debug_assert!(d >= 2);
        // the budget inequality from the dimension count; it must hold
        // whenever the hypotheses do
        if d - 2 > r - used {
            return Err(ConstructError::InternalInvariant(format!(
                "block of dimension {d} exceeds the remaining budget {}",
                r - used
            )));
        }
        us.push(vec_add(&block.chain[0], &block.chain[d - 1]));
        for j in 2..d {
            us.push(vec_add(v[used + j - 2], &block.chain[j - 1]));
        }
        used += d - 2;
    }

    // pair the leftover eigenvectors with the Jordan vectors of the other
    // eigenvalues, chain by chain in chain order
    let xi: Vec<&Vec<Rational>> = others.iter().flat_map(|s| s.chain.iter()).collect();
    let alpha = r - used;
    if xi.len() != alpha {
        return Err(ConstructError::InternalInvariant(format!(
            "residual pairing needs {alpha} vectors, found {}",
            xi.len()
        )));
    }
    for (k, x) in xi.iter().enumerate() {
        us.push(vec_add(v[used + k], x));
    }
    Ok(us)
}

/// Recursive half construction on a summand list of total dimension `2n`
/// with all multiplicities at most `n`.
fn half_from_summands(
    summands: &[CyclicSummand],
    n: usize,
) -> Result<Vec<Vec<Rational>>, ConstructError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let counts = multiplicities(summands);
    debug_assert!(counts.values().all(|&c| c <= n));
    if counts.values().any(|&c| c == n) {
        return boundary_from_summands(summands, n);
    }

    // all multiplicities < n: peel off a 2-dimensional complement
    let one_dim_eigenvalues: Vec<usize> = {
        let mut firsts: Vec<usize> = Vec::new();
        let mut seen: Vec<&Rational> = Vec::new();
        for (idx, s) in summands.iter().enumerate() {
            if s.dimension() == 1 && !seen.contains(&&s.eigenvalue) {
                seen.push(&s.eigenvalue);
                firsts.push(idx);
            }
        }
        firsts
    };

    let (u, rest) = if one_dim_eigenvalues.len() >= 2 {
        // two 1-dimensional summands of distinct eigenvalues
        let (ia, ib) = (one_dim_eigenvalues[0], one_dim_eigenvalues[1]);
        let u = vec_add(&summands[ia].chain[0], &summands[ib].chain[0]);
        let rest: Vec<CyclicSummand> = summands
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ia && *i != ib)
            .map(|(_, s)| s.clone())
            .collect();
        (u, rest)
    } else {
        // at most one eigenvalue contributes 1-dimensional summands, so a
        // deeper chain exists; take its top and keep the chain shortened by
        // two
        let Some(idx) = summands.iter().position(|s| s.dimension() >= 2) else {
            return Err(ConstructError::InternalInvariant(
                "no deep chain although multiplicities are below n".into(),
            ));
        };
        let block = &summands[idx];
        let d = block.dimension();
        let u = block.chain[d - 1].clone();
        let mut rest: Vec<CyclicSummand> = summands
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, s)| s.clone())
            .collect();
        if let Some(shortened) = truncate(block, d - 2) {
            rest.push(shortened);
        }
        (u, rest)
    };

    let rest = sorted_summands(rest);
    let mut us = half_from_summands(&rest, n - 1)?;
    us.push(u);
    Ok(us)
}

/// Select a `2n`-dimensional invariant subspace (as truncated summands) on
/// which every eigenvalue keeps geometric multiplicity at most `n`.
fn select_invariant_2n(
    summands: &[CyclicSummand],
    n: usize,
    m: usize,
) -> Result<Vec<CyclicSummand>, ConstructError> {
    let c = m - 2 * n;
    if c == 0 {
        return Ok(summands.to_vec());
    }
    let counts = multiplicities(summands);
    let mu = counts.values().copied().max().unwrap_or(0);

    if mu <= n {
        if mu == 1 && summands.iter().all(|s| s.dimension() == 1) {
            // m distinct eigenvalues: keep the first 2n eigenlines
            return Ok(summands[..2 * n].to_vec());
        }
        // one summand long enough to absorb the whole truncation?
        let by_dim_desc = {
            let mut idx: Vec<usize> = (0..summands.len()).collect();
            idx.sort_by(|&a, &b| summands[b].dimension().cmp(&summands[a].dimension()));
            idx
        };
        let longest = by_dim_desc[0];
        if summands[longest].dimension() >= c {
            let mut out: Vec<CyclicSummand> = summands
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != longest)
                .map(|(_, s)| s.clone())
                .collect();
            let keep = summands[longest].dimension() - c;
            if let Some(shortened) = truncate(&summands[longest], keep) {
                out.push(shortened);
            }
            return Ok(sorted_summands(out));
        }
        // otherwise assemble the smallest family that covers the truncation
        // (greedy by descending dimension) and shorten its last member
        let mut family: Vec<usize> = Vec::new();
        let mut covered = 0usize;
        for &i in &by_dim_desc {
            family.push(i);
            covered += summands[i].dimension();
            if covered >= c {
                break;
            }
        }
        let ell = covered - c;
        let last = *family.last().expect("total dimension exceeds c");
        if summands[last].dimension() <= ell {
            return Err(ConstructError::InternalInvariant(
                "family minimality must leave room in its smallest member".into(),
            ));
        }
        let mut out: Vec<CyclicSummand> = summands
            .iter()
            .enumerate()
            .filter(|(i, _)| !family.contains(i))
            .map(|(_, s)| s.clone())
            .collect();
        if let Some(shortened) = truncate(&summands[last], ell) {
            out.push(shortened);
        }
        return Ok(sorted_summands(out));
    }

    // mu > n: bring the dominant eigenspace down to n
    let lambda1 = counts
        .iter()
        .find(|(_, &cnt)| cnt == mu)
        .map(|(ev, _)| ev.clone())
        .expect("mu is attained");
    let c1 = mu - n;
    debug_assert!(c1 <= c, "hypothesis keeps mu <= m - n");

    let mut cur: Vec<CyclicSummand> = summands.to_vec();
    let mut c_cur = c;
    loop {
        if c_cur == c1 {
            // drop c1 one-dimensional summands of lambda1
            let ones: Vec<usize> = cur
                .iter()
                .enumerate()
                .filter(|(_, s)| s.eigenvalue == lambda1 && s.dimension() == 1)
                .map(|(i, _)| i)
                .collect();
            if ones.len() < c_cur {
                return Err(ConstructError::InternalInvariant(
                    "dimension count guarantees enough eigenlines to drop".into(),
                ));
            }
            let drop: Vec<usize> = ones[..c_cur].to_vec();
            let out: Vec<CyclicSummand> = cur
                .iter()
                .enumerate()
                .filter(|(i, _)| !drop.contains(i))
                .map(|(_, s)| s.clone())
                .collect();
            return Ok(sorted_summands(out));
        }
        if cur.iter().all(|s| s.dimension() == 1) {
            // diagonalizable leftover: n lines of lambda1 plus n others
            let lam: Vec<usize> = cur
                .iter()
                .enumerate()
                .filter(|(_, s)| s.eigenvalue == lambda1)
                .map(|(i, _)| i)
                .take(n)
                .collect();
            let others: Vec<usize> = cur
                .iter()
                .enumerate()
                .filter(|(_, s)| s.eigenvalue != lambda1)
                .map(|(i, _)| i)
                .take(n)
                .collect();
            if lam.len() < n || others.len() < n {
                return Err(ConstructError::InternalInvariant(
                    "diagonalizable regime must offer n lines on both sides".into(),
                ));
            }
            let keep: Vec<usize> = lam.into_iter().chain(others).collect();
            let out: Vec<CyclicSummand> = cur
                .iter()
                .enumerate()
                .filter(|(i, _)| keep.contains(i))
                .map(|(_, s)| s.clone())
                .collect();
            return Ok(sorted_summands(out));
        }
        // shorten one deep chain by a single vector; multiplicities are
        // untouched because the eigenvector stays
        let deepest = (0..cur.len())
            .max_by_key(|&i| cur[i].dimension())
            .expect("nonempty");
        let d = cur[deepest].dimension();
        debug_assert!(d >= 2);
        cur[deepest] = truncate(&cur[deepest], d - 1).expect("d - 1 >= 1");
        c_cur -= 1;
    }
}
