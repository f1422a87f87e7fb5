//! Top-level uniqueness certifiers.
//!
//! Each certifier checks a sufficient condition with exact arithmetic and
//! returns a machine-checkable certificate. Verdicts are one-sided: a failed
//! hypothesis yields `Undecided`, never `Refuted` — refutation requires a
//! concrete counterexample pair, which only the oracle produces.

use crate::construct::construct_general;
use crate::exactalg::{rat_int, ExactError, Rational, RationalMatrix};
use crate::permcodim::{
    codim_account, CodimAccount, CoordinateProjection, PermError, SignedPermutation,
};
use crate::structure::{
    geometric_multiplicities, max_multiplicity_excluding, EigenDescriptor, StructureError,
};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Integer entry bound for sampled sections.
const SECTION_SAMPLE_BOUND: i64 = 100;
/// Default number of sampling attempts before giving up on a section.
pub const DEFAULT_SECTION_TRIALS: usize = 16;
/// Number of independently sampled sections that must agree.
const SECTION_AGREEMENT_SAMPLES: usize = 5;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("transformations must be square matrices of equal size, got {0}")]
    ShapeMismatch(String),
    #[error("need m >= 2n and n >= 1, got m = {m}, n = {n}")]
    InvalidDimensions { m: usize, n: usize },
    #[error("the second transformation has rank zero")]
    ZeroRank,
    #[error("section sampling exhausted after {trials} trials")]
    SamplingExhausted { trials: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Undecided,
    Refuted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Prop5Eigen,
    Thm1TauH,
    Thm2Permutation,
    Cor3Signed,
    Prop4GeneralPoint,
}

/// Which identifications count as "unique": `v1 = v2` only, or also
/// `v1 = -v2` once sign flips are part of the transformation class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignMode {
    Plain,
    PlusMinus,
}

impl SignMode {
    pub fn excluded_values(&self) -> Vec<Rational> {
        match self {
            SignMode::Plain => vec![rat_int(1)],
            SignMode::PlusMinus => vec![rat_int(1), rat_int(-1)],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertParams {
    pub m: usize,
    pub n: usize,
    pub sign_mode: SignMode,
}

/// A named rank requirement with the exactly computed value.
#[derive(Clone, Debug)]
pub struct RankGate {
    pub name: String,
    pub required: usize,
    pub actual: usize,
}

impl RankGate {
    pub fn passed(&self) -> bool {
        self.actual >= self.required
    }
}

/// Multiplicity table together with the inequality it is checked against.
#[derive(Clone, Debug)]
pub struct MultiplicityEvidence {
    pub table: Vec<(EigenDescriptor, usize)>,
    pub excluded: Vec<Rational>,
    pub max_excluded: usize,
    pub threshold: usize,
}

impl MultiplicityEvidence {
    pub fn holds(&self) -> bool {
        self.max_excluded <= self.threshold
    }
}

#[derive(Clone, Debug)]
pub enum Prop5Branch {
    /// The fixed eigenspace is at least `n`-dimensional; uniqueness follows
    /// from the invertibility of the selected row block.
    JordanIndex { fixed_eigenspace_dim: usize },
    /// All eigenspaces are small; a transversal witness subspace exists and
    /// is attached when the spectrum is rational.
    Transversality { witness_rank: Option<usize> },
}

#[derive(Clone, Debug)]
pub struct Prop5Evidence {
    pub multiplicities: MultiplicityEvidence,
    pub branch: Prop5Branch,
}

/// One sampled section in the rank-reduction route.
#[derive(Clone, Debug)]
pub struct TauHSample {
    pub seed: u64,
    pub section_dim: usize,
    pub max_excluded: usize,
    pub threshold: usize,
    pub passed: bool,
    pub table: Vec<(EigenDescriptor, usize)>,
}

#[derive(Clone, Debug)]
pub struct Thm1Evidence {
    pub rank_gates: Vec<RankGate>,
    pub samples: Vec<TauHSample>,
    /// All samples agreed on pass/fail. Disagreement downgrades to
    /// `Undecided` even if some samples passed.
    pub agreement: bool,
    /// What the sampling certifies: the eigenvalue condition of the
    /// restricted map on randomly chosen sections, not the ambient locus
    /// dimension itself.
    pub note: &'static str,
}

#[derive(Clone, Debug)]
pub struct Thm2Evidence {
    pub account: CodimAccount,
    /// Image array of the single composite permutation the account ran on.
    pub composite: Vec<usize>,
    pub dim_bound: usize,
    pub threshold: usize,
    pub rank_gates: Vec<RankGate>,
    pub excluded: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct Prop4Evidence {
    pub rank_gates: Vec<RankGate>,
    pub scalar_multiples: bool,
    /// A point whose two images are linearly independent.
    pub witness_point: Option<Vec<Rational>>,
    pub witness_basis: Option<RationalMatrix>,
    /// Rank of `[T1 A | T2 v]`; equals `n + 1` on success.
    pub witness_rank: Option<usize>,
}

#[derive(Clone, Debug)]
pub enum Evidence {
    Prop5(Prop5Evidence),
    Thm1(Thm1Evidence),
    Thm2(Thm2Evidence),
    Prop4(Prop4Evidence),
}

/// Machine-checkable uniqueness verdict with its full evidence trail.
#[derive(Clone, Debug)]
pub struct UniquenessCertificate {
    pub verdict: Verdict,
    pub route: Route,
    pub parameters: CertParams,
    pub evidence: Evidence,
    /// Present exactly when the verdict is `Refuted`.
    pub counterexample: Option<(Vec<Rational>, Vec<Rational>)>,
}

impl UniquenessCertificate {
    fn new(verdict: Verdict, route: Route, parameters: CertParams, evidence: Evidence) -> Self {
        debug_assert_ne!(verdict, Verdict::Refuted, "refutation needs a counterexample");
        Self {
            verdict,
            route,
            parameters,
            evidence,
            counterexample: None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

/// A pair of endomorphisms with the derived data the certifiers consume.
#[derive(Clone, Debug)]
pub struct EndoPair {
    pub t1: RationalMatrix,
    pub t2: RationalMatrix,
    pub rank1: usize,
    pub rank2: usize,
    /// Dimension of `ker(rho t1 - t2)` for the canonical projection onto
    /// the image of `t2`.
    pub ker_diff_dim: usize,
}

impl EndoPair {
    pub fn new(t1: RationalMatrix, t2: RationalMatrix) -> Result<Self, CertifyError> {
        check_pair_shapes(&t1, &t2)?;
        let rank1 = t1.rank();
        let rank2 = t2.rank();
        let rho = projection_onto_image(&t2);
        let diff = &rho.matmul(&t1) - &t2;
        let ker_diff_dim = diff.kernel_basis().cols();
        Ok(Self {
            t1,
            t2,
            rank1,
            rank2,
            ker_diff_dim,
        })
    }
}

fn check_pair_shapes(t1: &RationalMatrix, t2: &RationalMatrix) -> Result<(), CertifyError> {
    if !t1.is_square() || !t2.is_square() || t1.rows() != t2.rows() {
        return Err(CertifyError::ShapeMismatch(format!(
            "{}x{} and {}x{}",
            t1.rows(),
            t1.cols(),
            t2.rows(),
            t2.cols()
        )));
    }
    Ok(())
}

/// Canonical idempotent projecting onto the column space of `t`, along the
/// complement spanned by the canonical vectors at the non-pivot rows of the
/// column echelon form. Deterministic in `t`.
pub fn projection_onto_image(t: &RationalMatrix) -> RationalMatrix {
    let m = t.rows();
    let echelon = t.transpose().rref();
    let pivot_rows = echelon.pivots.clone();
    let rank = pivot_rows.len();
    // columns of the echelon column-space basis
    let mut basis_cols: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for r in 0..rank {
        basis_cols.push(echelon.reduced.row(r).to_vec());
    }
    for i in 0..m {
        if !pivot_rows.contains(&i) {
            let mut e = vec![Rational::zero(); m];
            e[i] = Rational::one();
            basis_cols.push(e);
        }
    }
    let change = RationalMatrix::from_columns(&basis_cols).expect("basis columns share length");
    let inv = change.inverse().expect("echelon basis plus complement is invertible");
    // [C | 0] * change^{-1}
    let mut image_part = RationalMatrix::zeros(m, m);
    for (c, col) in basis_cols.iter().take(rank).enumerate() {
        for r in 0..m {
            image_part.set(r, c, col[r].clone());
        }
    }
    image_part.matmul(&inv)
}

/// Result of restricting the pair to a sampled section of the image.
#[derive(Clone, Debug)]
pub struct TauHReduction {
    /// Matrix of the restricted endomorphism on the section basis.
    pub t_h: RationalMatrix,
    /// `m x l` basis of the sampled section `H` with `H ∩ ker(t2) = 0`.
    pub h_basis: RationalMatrix,
    /// The canonical idempotent onto the image of `t2`.
    pub rho: RationalMatrix,
}

/// Sample an `l`-dimensional section `H` transversal to `ker(t2)`
/// (`l = rank(t2)`) and return the matrix of `(t2|_H)^{-1} rho t1|_H` on the
/// sampled basis. Deterministic per seed.
pub fn reduce_tau_h(
    t1: &RationalMatrix,
    t2: &RationalMatrix,
    trials: usize,
    seed: u64,
) -> Result<TauHReduction, CertifyError> {
    check_pair_shapes(t1, t2)?;
    let m = t1.rows();
    let ell = t2.rank();
    if ell == 0 {
        return Err(CertifyError::ZeroRank);
    }
    let rho = projection_onto_image(t2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials.max(1) {
        let h_basis = RationalMatrix::from_fn(m, ell, |_, _| {
            rat_int(rng.gen_range(-SECTION_SAMPLE_BOUND..=SECTION_SAMPLE_BOUND))
        });
        let t2h = t2.matmul(&h_basis);
        if t2h.rank() != ell {
            continue;
        }
        let rhs = rho.matmul(&t1.matmul(&h_basis));
        let t_h = t2h
            .solve(&rhs)
            .expect("projected image lies in the column space of t2 H");
        debug_assert_eq!(t2h.matmul(&t_h), rhs);
        return Ok(TauHReduction { t_h, h_basis, rho });
    }
    Err(CertifyError::SamplingExhausted { trials })
}

/// Eigen-multiplicity certifier: for a single endomorphism `t`, certified
/// when every eigenvalue other than 1 has geometric multiplicity at most
/// `m - n`. Evidence records which proof branch applies.
pub fn certify_prop5(t: &RationalMatrix, n: usize) -> Result<UniquenessCertificate, CertifyError> {
    if !t.is_square() {
        return Err(CertifyError::ShapeMismatch(format!("{}x{}", t.rows(), t.cols())));
    }
    let m = t.rows();
    if n < 1 || m < 2 * n {
        return Err(CertifyError::InvalidDimensions { m, n });
    }
    let excluded = vec![rat_int(1)];
    let report = geometric_multiplicities(t)?;
    let max_excluded = max_multiplicity_excluding(t, &excluded)?;
    let threshold = m - n;
    let certified = max_excluded <= threshold;
    let fixed_dim = report.multiplicity_of(&rat_int(1));

    let branch = if fixed_dim >= n {
        Prop5Branch::JordanIndex {
            fixed_eigenspace_dim: fixed_dim,
        }
    } else {
        let witness_rank = if certified {
            construct_general(t, n).ok().map(|w| w.certificate_rank)
        } else {
            None
        };
        Prop5Branch::Transversality { witness_rank }
    };

    let evidence = Evidence::Prop5(Prop5Evidence {
        multiplicities: MultiplicityEvidence {
            table: report.entries,
            excluded,
            max_excluded,
            threshold,
        },
        branch,
    });
    let verdict = if certified {
        Verdict::Certified
    } else {
        Verdict::Undecided
    };
    Ok(UniquenessCertificate::new(
        verdict,
        Route::Prop5Eigen,
        CertParams {
            m,
            n,
            sign_mode: SignMode::Plain,
        },
        evidence,
    ))
}

/// Rank-reduction certifier for a general pair: checks the two rank gates
/// exactly, then certifies the remaining hypothesis through independently
/// sampled sections, all of which must agree.
pub fn certify_thm1(
    t1: &RationalMatrix,
    t2: &RationalMatrix,
    n: usize,
    seed: u64,
) -> Result<UniquenessCertificate, CertifyError> {
    let pair = EndoPair::new(t1.clone(), t2.clone())?;
    let m = pair.t1.rows();
    if n < 1 || m < 2 * n {
        return Err(CertifyError::InvalidDimensions { m, n });
    }
    let params = CertParams {
        m,
        n,
        sign_mode: SignMode::Plain,
    };
    let rank_gates = vec![
        RankGate {
            name: "rank(t2) >= 2n".into(),
            required: 2 * n,
            actual: pair.rank2,
        },
        RankGate {
            name: "rank(t1) >= n".into(),
            required: n,
            actual: pair.rank1,
        },
    ];
    if !rank_gates.iter().all(RankGate::passed) {
        return Ok(UniquenessCertificate::new(
            Verdict::Undecided,
            Route::Thm1TauH,
            params,
            Evidence::Thm1(Thm1Evidence {
                rank_gates,
                samples: Vec::new(),
                agreement: true,
                note: TAU_H_NOTE,
            }),
        ));
    }

    let ell = pair.rank2;
    let threshold = ell - n;
    let excluded = vec![rat_int(1)];
    let mut samples = Vec::with_capacity(SECTION_AGREEMENT_SAMPLES);
    for i in 0..SECTION_AGREEMENT_SAMPLES {
        let sample_seed = seed.wrapping_add(i as u64);
        let reduction = reduce_tau_h(t1, t2, DEFAULT_SECTION_TRIALS, sample_seed)?;
        let report = geometric_multiplicities(&reduction.t_h)?;
        let max_excluded = max_multiplicity_excluding(&reduction.t_h, &excluded)?;
        samples.push(TauHSample {
            seed: sample_seed,
            section_dim: ell,
            max_excluded,
            threshold,
            passed: max_excluded <= threshold,
            table: report.entries,
        });
    }
    let all_passed = samples.iter().all(|s| s.passed);
    let none_passed = samples.iter().all(|s| !s.passed);
    let agreement = all_passed || none_passed;
    let verdict = if all_passed {
        Verdict::Certified
    } else {
        Verdict::Undecided
    };
    Ok(UniquenessCertificate::new(
        verdict,
        Route::Thm1TauH,
        params,
        Evidence::Thm1(Thm1Evidence {
            rank_gates,
            samples,
            agreement,
            note: TAU_H_NOTE,
        }),
    ))
}

const TAU_H_NOTE: &str =
    "certifies the eigenvalue condition of the restricted map on sampled sections, \
     not the ambient locus dimension itself";

/// Permutation-class certifier. Composes the two signed permutations into a
/// single one, runs the codimension accounting, and combines it with the
/// rank gates. Negative signs anywhere switch the verdict to the plus-minus
/// identification with excluded scalars `{1, -1}`.
pub fn certify_thm2(
    pi1: &SignedPermutation,
    pi2: &SignedPermutation,
    rho1: &CoordinateProjection,
    rho2: &CoordinateProjection,
    n: usize,
) -> Result<UniquenessCertificate, CertifyError> {
    let m = pi1.size();
    if pi2.size() != m || rho1.size() != m || rho2.size() != m {
        return Err(PermError::SizeMismatch {
            perm: pi2.size(),
            rho1: rho1.size(),
            rho2: rho2.size(),
        }
        .into());
    }
    if n < 1 || m < 2 * n {
        return Err(CertifyError::InvalidDimensions { m, n });
    }
    let sign_mode = if pi1.has_negative_sign() || pi2.has_negative_sign() {
        SignMode::PlusMinus
    } else {
        SignMode::Plain
    };
    let excluded = sign_mode.excluded_values();
    let composite = pi1.compose(&pi2.inverse());
    let account = codim_account(&composite, rho1, rho2)?;
    let dim_bound = m - account.codim_bound;
    let threshold = m - n;

    let overlap = rho2.kept().iter().filter(|&&i| rho1.keeps(i)).count();
    let rank_gates = vec![
        RankGate {
            name: "rank(rho2) >= 2n".into(),
            required: 2 * n,
            actual: rho2.rank(),
        },
        RankGate {
            name: "rank(rho2 rho1 pi1) >= n".into(),
            required: n,
            actual: overlap,
        },
    ];
    let certified = rank_gates.iter().all(RankGate::passed) && dim_bound <= threshold;
    let route = match sign_mode {
        SignMode::Plain => Route::Thm2Permutation,
        SignMode::PlusMinus => Route::Cor3Signed,
    };
    Ok(UniquenessCertificate::new(
        if certified {
            Verdict::Certified
        } else {
            Verdict::Undecided
        },
        route,
        CertParams { m, n, sign_mode },
        Evidence::Thm2(Thm2Evidence {
            account,
            composite: composite.perm().to_vec(),
            dim_bound,
            threshold,
            rank_gates,
            excluded,
        }),
    ))
}

/// General-point certifier: certified when both ranks are at least `n + 1`
/// and the transformations are not scalar multiples of each other. The
/// evidence carries an explicit point whose images are independent and a
/// basis achieving rank `n + 1`.
pub fn certify_prop4(
    t1: &RationalMatrix,
    t2: &RationalMatrix,
    n: usize,
) -> Result<UniquenessCertificate, CertifyError> {
    let pair = EndoPair::new(t1.clone(), t2.clone())?;
    let m = pair.t1.rows();
    let params = CertParams {
        m,
        n,
        sign_mode: SignMode::Plain,
    };
    let rank_gates = vec![
        RankGate {
            name: "rank(t1) >= n+1".into(),
            required: n + 1,
            actual: pair.rank1,
        },
        RankGate {
            name: "rank(t2) >= n+1".into(),
            required: n + 1,
            actual: pair.rank2,
        },
    ];
    let scalar_multiples = are_scalar_multiples(t1, t2);
    let gates_ok = rank_gates.iter().all(RankGate::passed);

    let mut evidence = Prop4Evidence {
        rank_gates,
        scalar_multiples,
        witness_point: None,
        witness_basis: None,
        witness_rank: None,
    };
    if !gates_ok || scalar_multiples {
        return Ok(UniquenessCertificate::new(
            Verdict::Undecided,
            Route::Prop4GeneralPoint,
            params,
            Evidence::Prop4(evidence),
        ));
    }
    if n == 0 {
        // the zero subspace carries only the zero point
        return Ok(UniquenessCertificate::new(
            Verdict::Certified,
            Route::Prop4GeneralPoint,
            params,
            Evidence::Prop4(evidence),
        ));
    }

    let v = find_independent_point(t1, t2)
        .expect("non-proportional transformations separate some point");
    let basis = general_point_basis(t1, t2, &v, n);
    let verdict = match &basis {
        Some(a) => {
            let t2v = t2.mul_vec(&v);
            let t2v_col = RationalMatrix::from_columns(&[t2v]).expect("single column");
            let rank = t1.matmul(a).hstack(&t2v_col).rank();
            evidence.witness_rank = Some(rank);
            if rank == n + 1 {
                Verdict::Certified
            } else {
                Verdict::Undecided
            }
        }
        None => Verdict::Undecided,
    };
    evidence.witness_point = Some(v);
    evidence.witness_basis = basis;
    Ok(UniquenessCertificate::new(
        verdict,
        Route::Prop4GeneralPoint,
        params,
        Evidence::Prop4(evidence),
    ))
}

/// True when `t1 = c * t2` or `t2 = c * t1` for some scalar `c`.
fn are_scalar_multiples(t1: &RationalMatrix, t2: &RationalMatrix) -> bool {
    let proportional = |a: &RationalMatrix, b: &RationalMatrix| -> bool {
        // is a = c*b for some c?
        let mut ratio: Option<Rational> = None;
        for r in 0..a.rows() {
            for c in 0..a.cols() {
                let (x, y) = (a.at(r, c), b.at(r, c));
                if y.is_zero() {
                    if !x.is_zero() {
                        return false;
                    }
                    continue;
                }
                let q = x / y;
                match &ratio {
                    None => ratio = Some(q),
                    Some(prev) if *prev != q => return false,
                    _ => {}
                }
            }
        }
        true
    };
    proportional(t1, t2) || proportional(t2, t1)
}

/// Deterministic search for a point whose two images are linearly
/// independent: canonical vectors, then pair sums, then seeded samples.
fn find_independent_point(t1: &RationalMatrix, t2: &RationalMatrix) -> Option<Vec<Rational>> {
    let m = t1.rows();
    let independent = |v: &Vec<Rational>| {
        let images = RationalMatrix::from_columns(&[t1.mul_vec(v), t2.mul_vec(v)]).unwrap();
        images.rank() == 2
    };
    for i in 0..m {
        let mut v = vec![Rational::zero(); m];
        v[i] = Rational::one();
        if independent(&v) {
            return Some(v);
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let mut v = vec![Rational::zero(); m];
            v[i] = Rational::one();
            v[j] = Rational::one();
            if independent(&v) {
                return Some(v);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    for _ in 0..256 {
        let v: Vec<Rational> = (0..m).map(|_| rat_int(rng.gen_range(-50..=50))).collect();
        if independent(&v) {
            return Some(v);
        }
    }
    None
}

/// Extend the independent point to a basis `A = [V1 | v]` where
/// `t1(V1)` is an `(n-1)`-dimensional complement of
/// `span(t1 v, t2 v) ∩ im(t1)` inside the image.
fn general_point_basis(
    t1: &RationalMatrix,
    t2: &RationalMatrix,
    v: &[Rational],
    n: usize,
) -> Option<RationalMatrix> {
    let m = t1.rows();
    let w_basis = RationalMatrix::from_columns(&[t1.mul_vec(v), t2.mul_vec(v)]).ok()?;
    // image basis of t1 (echelon columns)
    let echelon = t1.transpose().rref();
    let image_cols: Vec<Vec<Rational>> = (0..echelon.rank())
        .map(|r| echelon.reduced.row(r).to_vec())
        .collect();
    // intersection of span(w) with the image via the kernel of [W | -Im]
    let im_matrix = RationalMatrix::from_columns(&image_cols).ok()?;
    let stacked = w_basis.hstack(&im_matrix.scale(&-Rational::one()));
    let kernel = stacked.kernel_basis();
    let mut intersection_cols: Vec<Vec<Rational>> = Vec::new();
    for k in 0..kernel.cols() {
        let coeffs: Vec<Rational> = (0..2).map(|r| kernel.at(r, k).clone()).collect();
        let vec: Vec<Rational> = (0..m)
            .map(|r| {
                let mut acc = Rational::zero();
                for (c, coeff) in coeffs.iter().enumerate() {
                    acc += w_basis.at(r, c) * coeff;
                }
                acc
            })
            .collect();
        if vec.iter().any(|x| !x.is_zero()) {
            intersection_cols.push(vec);
        }
    }
    // greedily extend the intersection to a basis of the image; the added
    // vectors span a complement C
    let mut spanning = intersection_cols.clone();
    let mut complement: Vec<Vec<Rational>> = Vec::new();
    for col in image_cols {
        let mut trial = spanning.clone();
        trial.push(col.clone());
        let rank = RationalMatrix::from_columns(&trial).ok()?.rank();
        if rank == trial.len() {
            spanning = trial;
            complement.push(col);
        }
    }
    if complement.len() < n - 1 {
        return None;
    }
    // preimages of the first n-1 complement vectors
    let mut columns: Vec<Vec<Rational>> = Vec::with_capacity(n);
    for c in complement.into_iter().take(n - 1) {
        let rhs = RationalMatrix::from_columns(&[c]).ok()?;
        let u = t1.solve(&rhs)?;
        columns.push(u.column(0));
    }
    columns.push(v.to_vec());
    let a = RationalMatrix::from_columns(&columns).ok()?;
    if a.rank() != n {
        return None;
    }
    Some(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::charpoly;

    #[test]
    fn prop5_identity_certifies() {
        let cert = certify_prop5(&RationalMatrix::identity(4), 2).unwrap();
        assert!(cert.is_certified());
        match &cert.evidence {
            Evidence::Prop5(e) => {
                assert_eq!(e.multiplicities.max_excluded, 0);
                assert!(matches!(
                    e.branch,
                    Prop5Branch::JordanIndex {
                        fixed_eigenspace_dim: 4
                    }
                ));
            }
            _ => panic!("wrong evidence kind"),
        }
    }

    #[test]
    fn prop5_oversized_eigenspace_is_undecided() {
        let t = RationalMatrix::diagonal(&[rat_int(2), rat_int(2), rat_int(2), rat_int(3)]);
        let cert = certify_prop5(&t, 2).unwrap();
        assert_eq!(cert.verdict, Verdict::Undecided);
        match &cert.evidence {
            Evidence::Prop5(e) => {
                assert_eq!(e.multiplicities.max_excluded, 3);
                assert_eq!(e.multiplicities.threshold, 2);
            }
            _ => panic!("wrong evidence kind"),
        }
        assert!(certify_prop5(&t, 3).is_err());
    }

    #[test]
    fn prop5_signed_cycle_certifies() {
        // single signed 6-cycle: every eigenspace is one-dimensional
        let perm: Vec<usize> = (0..6).map(|j| (j + 1) % 6).collect();
        let pi = SignedPermutation::new(perm, vec![1, 1, -1, 1, 1, 1]).unwrap();
        let cert = certify_prop5(&pi.to_matrix(), 3).unwrap();
        assert!(cert.is_certified());
        match &cert.evidence {
            Evidence::Prop5(e) => assert_eq!(e.multiplicities.max_excluded, 1),
            _ => panic!("wrong evidence kind"),
        }
    }

    #[test]
    fn reduce_full_rank_is_similar_to_product() {
        let t1 = RationalMatrix::from_int_rows(&[vec![1, 2], vec![0, 1]]);
        let t2 = RationalMatrix::from_int_rows(&[vec![2, 0], vec![1, 1]]);
        let red = reduce_tau_h(&t1, &t2, 8, 7).unwrap();
        // rho = id here, so t_h is similar to t2^{-1} t1
        let expect = t2.inverse().unwrap().matmul(&t1);
        assert_eq!(
            charpoly(&red.t_h).unwrap(),
            charpoly(&expect).unwrap()
        );
    }

    #[test]
    fn reduce_equal_pair_gives_identity() {
        // t1 = t2 of rank 2 in dimension 3
        let t = RationalMatrix::from_int_rows(&[vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 2]]);
        assert_eq!(t.rank(), 2);
        let red = reduce_tau_h(&t, &t, 8, 3).unwrap();
        assert_eq!(red.t_h, RationalMatrix::identity(2));
        // sampled section is transversal: t2 * H has full rank
        assert_eq!(t.matmul(&red.h_basis).rank(), 2);
    }

    #[test]
    fn reduce_samples_transversal_sections_at_low_rank() {
        // rank-3 second map in dimension 5: the sampled 5x3 section basis
        // must satisfy rank(t2 * H) = 3
        let t2 = RationalMatrix::from_int_rows(&[
            vec![1, 0, 2, 0, 0],
            vec![0, 1, 1, 0, 0],
            vec![0, 0, 0, 1, 3],
            vec![1, 0, 2, 1, 3],
            vec![0, 1, 1, -1, -3],
        ]);
        assert_eq!(t2.rank(), 3);
        let t1 = RationalMatrix::identity(5);
        let red = reduce_tau_h(&t1, &t2, 16, 9).unwrap();
        assert_eq!((red.h_basis.rows(), red.h_basis.cols()), (5, 3));
        assert_eq!(t2.matmul(&red.h_basis).rank(), 3);
        assert_eq!(red.t_h.rows(), 3);
    }

    #[test]
    fn endo_pair_derived_data() {
        let id = RationalMatrix::identity(3);
        let pair = EndoPair::new(id.clone(), id.clone()).unwrap();
        assert_eq!((pair.rank1, pair.rank2), (3, 3));
        // rho = id, so ker(rho t1 - t2) = ker(0) is everything
        assert_eq!(pair.ker_diff_dim, 3);
        let low = RationalMatrix::diagonal(&[rat_int(1), rat_int(2), rat_int(0)]);
        let pair = EndoPair::new(id, low).unwrap();
        assert_eq!(pair.rank2, 2);
        assert!(EndoPair::new(
            RationalMatrix::identity(2),
            RationalMatrix::identity(3)
        )
        .is_err());
    }

    #[test]
    fn thm1_agrees_with_thm2_on_plain_permutation_pairs() {
        // full projections: the permutation certifier always certifies, and
        // the sampled-section route must agree on the same pairs
        let pairs = [
            (vec![1, 2, 3, 0], vec![0, 1, 2, 3]),
            (vec![1, 0, 3, 2], vec![2, 3, 0, 1]),
            (vec![3, 2, 1, 0], vec![1, 2, 0, 3]),
        ];
        let full = CoordinateProjection::full(4);
        for (p1, p2) in pairs {
            let pi1 = SignedPermutation::plain(p1).unwrap();
            let pi2 = SignedPermutation::plain(p2).unwrap();
            let via_account = certify_thm2(&pi1, &pi2, &full, &full, 2).unwrap();
            let via_sections =
                certify_thm1(&pi1.to_matrix(), &pi2.to_matrix(), 2, 31).unwrap();
            assert!(via_account.is_certified());
            assert!(via_sections.is_certified());
        }
    }

    #[test]
    fn reduce_is_deterministic_per_seed() {
        let t1 = RationalMatrix::identity(4);
        let t2 = RationalMatrix::from_int_rows(&[
            vec![1, 2, 0, 0],
            vec![0, 1, 0, 3],
            vec![0, 0, 2, 1],
            vec![1, 0, 0, 1],
        ]);
        let a = reduce_tau_h(&t1, &t2, 8, 11).unwrap();
        let b = reduce_tau_h(&t1, &t2, 8, 11).unwrap();
        assert_eq!(a.t_h, b.t_h);
        assert_eq!(a.h_basis, b.h_basis);
        assert!(reduce_tau_h(&t1, &RationalMatrix::zeros(4, 4), 8, 0).is_err());
    }

    #[test]
    fn thm1_identity_pair_certifies() {
        let id = RationalMatrix::identity(4);
        let cert = certify_thm1(&id, &id, 2, 17).unwrap();
        assert!(cert.is_certified());
    }

    #[test]
    fn thm1_scaled_identity_is_undecided() {
        let id = RationalMatrix::identity(4);
        let double = id.scale(&rat_int(2));
        let cert = certify_thm1(&id, &double, 2, 5).unwrap();
        assert_eq!(cert.verdict, Verdict::Undecided);
        match &cert.evidence {
            Evidence::Thm1(e) => {
                assert!(e.agreement);
                assert!(e.samples.iter().all(|s| s.max_excluded == 4));
            }
            _ => panic!("wrong evidence kind"),
        }
    }

    #[test]
    fn thm1_rank_gate_failure_names_the_rank() {
        let id = RationalMatrix::identity(4);
        let low = RationalMatrix::diagonal(&[rat_int(1), rat_int(1), rat_int(1), rat_int(0)]);
        let cert = certify_thm1(&id, &low, 2, 0).unwrap();
        assert_eq!(cert.verdict, Verdict::Undecided);
        match &cert.evidence {
            Evidence::Thm1(e) => {
                let gate = &e.rank_gates[0];
                assert!(gate.name.contains("rank(t2)"));
                assert!(!gate.passed());
                assert!(e.samples.is_empty());
            }
            _ => panic!("wrong evidence kind"),
        }
    }

    #[test]
    fn thm2_full_projections_certify() {
        let pi1 = SignedPermutation::plain(vec![2, 0, 1, 4, 3, 5]).unwrap();
        let pi2 = SignedPermutation::plain(vec![5, 4, 3, 2, 1, 0]).unwrap();
        let full = CoordinateProjection::full(6);
        let cert = certify_thm2(&pi1, &pi2, &full, &full, 3).unwrap();
        assert!(cert.is_certified());
        assert_eq!(cert.route, Route::Thm2Permutation);
        assert_eq!(cert.parameters.sign_mode, SignMode::Plain);
    }

    #[test]
    fn thm2_rank_gate_blocks() {
        let id4 = SignedPermutation::identity(4);
        let rho2 = CoordinateProjection::new(4, vec![0, 1, 2]).unwrap(); // rank 3 = 2n - 1
        let full = CoordinateProjection::full(4);
        let cert = certify_thm2(&id4, &id4, &full, &rho2, 2).unwrap();
        assert_eq!(cert.verdict, Verdict::Undecided);
    }

    #[test]
    fn thm2_signed_identity_certifies_plus_minus() {
        let neg = SignedPermutation::new(vec![0, 1, 2, 3], vec![-1, -1, -1, -1]).unwrap();
        let full = CoordinateProjection::full(4);
        let cert = certify_thm2(&neg, &neg, &full, &full, 2).unwrap();
        assert!(cert.is_certified());
        assert_eq!(cert.route, Route::Cor3Signed);
        assert_eq!(cert.parameters.sign_mode, SignMode::PlusMinus);
        match &cert.evidence {
            Evidence::Thm2(e) => {
                assert_eq!(e.excluded, vec![rat_int(1), rat_int(-1)]);
                // signs cancel in the composite: all fixed points
                assert_eq!(e.account.i_fixed.len(), 4);
            }
            _ => panic!("wrong evidence kind"),
        }
    }

    #[test]
    fn prop4_scalar_multiples_undecided() {
        let id = RationalMatrix::identity(3);
        let double = id.scale(&rat_int(2));
        let cert = certify_prop4(&id, &double, 1).unwrap();
        assert_eq!(cert.verdict, Verdict::Undecided);
        match &cert.evidence {
            Evidence::Prop4(e) => assert!(e.scalar_multiples),
            _ => panic!("wrong evidence kind"),
        }
    }

    #[test]
    fn prop4_certified_with_expected_witness() {
        let t1 = RationalMatrix::identity(3);
        let t2 = RationalMatrix::diagonal(&[rat_int(1), rat_int(2), rat_int(3)]);
        let cert = certify_prop4(&t1, &t2, 1).unwrap();
        assert!(cert.is_certified());
        match &cert.evidence {
            Evidence::Prop4(e) => {
                assert_eq!(
                    e.witness_point,
                    Some(vec![rat_int(1), rat_int(1), rat_int(0)])
                );
                assert_eq!(e.witness_rank, Some(2));
            }
            _ => panic!("wrong evidence kind"),
        }
    }

    #[test]
    fn prop4_rank_gate_blocks() {
        // rank(t1) = 1 = n, needs n + 1
        let t1 = RationalMatrix::diagonal(&[rat_int(1), rat_int(0), rat_int(0)]);
        let t2 = RationalMatrix::diagonal(&[rat_int(1), rat_int(2), rat_int(3)]);
        let cert = certify_prop4(&t1, &t2, 1).unwrap();
        assert_eq!(cert.verdict, Verdict::Undecided);
    }

    #[test]
    fn projection_is_idempotent_onto_image() {
        let t = RationalMatrix::from_int_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        let rho = projection_onto_image(&t);
        assert_eq!(rho.matmul(&rho), rho);
        // rho fixes the image of t
        assert_eq!(rho.matmul(&t), t);
        assert_eq!(rho.rank(), t.rank());
    }
}
