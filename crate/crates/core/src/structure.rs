//! Endomorphism structure analysis: invariant factors of `yI - T`,
//! geometric multiplicities of eigenvalues (including irrational ones via
//! divisibility of invariant factors), and explicit Jordan chains for
//! rational eigenvalues.

use crate::exactalg::{
    charpoly, squarefree_and_rational_roots, ExactError, PolyMatrix, PolyQ, Rational,
    RationalMatrix,
};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("{lambda} is not an eigenvalue of the matrix")]
    NotAnEigenvalue { lambda: String },
    #[error("rational-spectrum required: characteristic polynomial does not split over Q")]
    IrrationalSpectrum,
}

/// Invariant factors of `yI - T`: the nonconstant monic diagonal entries of
/// its Smith normal form, in ascending divisibility order.
#[derive(Clone, Debug)]
pub struct InvariantFactorData {
    pub matrix_dim: usize,
    pub invariant_factors: Vec<PolyQ>,
    pub charpoly: PolyQ,
    /// Equal to the last invariant factor.
    pub minimal_polynomial: PolyQ,
}

/// Either a rational eigenvalue, or a squarefree polynomial tag standing for
/// a full orbit of conjugate irrational eigenvalues. Every root of a tag has
/// the same geometric multiplicity, which is what the tag reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EigenDescriptor {
    Rational(Rational),
    OrbitTag(PolyQ),
}

impl EigenDescriptor {
    /// Degree over Q: 1 for a rational eigenvalue, the tag degree otherwise.
    pub fn degree(&self) -> usize {
        match self {
            EigenDescriptor::Rational(_) => 1,
            EigenDescriptor::OrbitTag(p) => p.degree().unwrap_or(0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenMultiplicityReport {
    pub matrix_dim: usize,
    /// `(descriptor, geometric multiplicity)`, rational eigenvalues first in
    /// ascending order, then orbit tags in ascending divisibility position.
    pub entries: Vec<(EigenDescriptor, usize)>,
}

impl EigenMultiplicityReport {
    pub fn multiplicity_of(&self, lambda: &Rational) -> usize {
        self.entries
            .iter()
            .find_map(|(d, m)| match d {
                EigenDescriptor::Rational(v) if v == lambda => Some(*m),
                _ => None,
            })
            .unwrap_or(0)
    }
}

/// A maximal chain `w1, ..., wd` with `T w1 = lambda w1` and
/// `T wj = lambda wj + w(j-1)`.
#[derive(Clone, Debug)]
pub struct JordanChainSet {
    pub eigenvalue: Rational,
    /// Chains ordered by decreasing length, ties by lexicographic order of
    /// the normalized chain top.
    pub chains: Vec<Vec<Vec<Rational>>>,
}

impl JordanChainSet {
    pub fn geometric_multiplicity(&self) -> usize {
        self.chains.len()
    }

    pub fn algebraic_multiplicity(&self) -> usize {
        self.chains.iter().map(|c| c.len()).sum()
    }
}

/// One cyclic summand of the primary decomposition: an eigenvalue together
/// with a Jordan chain spanning the summand.
#[derive(Clone, Debug)]
pub struct CyclicSummand {
    pub eigenvalue: Rational,
    pub chain: Vec<Vec<Rational>>,
}

impl CyclicSummand {
    pub fn dimension(&self) -> usize {
        self.chain.len()
    }
}

/// Invariant factors via the Smith normal form of `yI - T`.
pub fn invariant_factors(t: &RationalMatrix) -> Result<InvariantFactorData, StructureError> {
    let cm = PolyMatrix::char_matrix(t)?;
    let snf = cm.smith_normal_form()?;
    let factors: Vec<PolyQ> = snf
        .diag
        .into_iter()
        .filter(|d| !d.is_constant())
        .collect();
    let cp = charpoly(t)?;
    let product = factors.iter().fold(PolyQ::one(), |acc, f| &acc * f);
    debug_assert_eq!(product, cp, "invariant factor product must be the charpoly");
    let minimal = factors.last().cloned().unwrap_or_else(PolyQ::one);
    Ok(InvariantFactorData {
        matrix_dim: t.rows(),
        invariant_factors: factors,
        charpoly: cp,
        minimal_polynomial: minimal,
    })
}

/// Geometric multiplicity of every eigenvalue over the algebraic closure.
///
/// Rational roots of the minimal polynomial are split off individually. The
/// irrational residue is cut along the divisibility chain
/// `gcd(residue, d1) | gcd(residue, d2) | ...` into coprime squarefree tags;
/// all roots of one tag first appear in the same invariant factor, so they
/// share their multiplicity and the tag reports it exactly.
pub fn geometric_multiplicities(
    t: &RationalMatrix,
) -> Result<EigenMultiplicityReport, StructureError> {
    let data = invariant_factors(t)?;
    let k = data.invariant_factors.len();
    let mut entries = Vec::new();
    if k == 0 {
        return Ok(EigenMultiplicityReport {
            matrix_dim: data.matrix_dim,
            entries,
        });
    }
    let (minimal_sf, rational_roots) = squarefree_and_rational_roots(&data.minimal_polynomial)?;
    let mut residue = minimal_sf;
    for (root, _) in &rational_roots {
        let lin = PolyQ::linear_root(root);
        let count = data
            .invariant_factors
            .iter()
            .filter(|f| lin.divides(f))
            .count();
        debug_assert!(count >= 1);
        entries.push((EigenDescriptor::Rational(root.clone()), count));
        let (q, r) = residue.div_rem(&lin)?;
        debug_assert!(r.is_zero());
        residue = q;
    }
    if !residue.is_constant() {
        let mut prev = PolyQ::one();
        for (i, factor) in data.invariant_factors.iter().enumerate() {
            let g = residue.gcd(factor);
            let (tag, r) = g.div_rem(&prev)?;
            debug_assert!(r.is_zero(), "gcds along the chain are nested");
            if !tag.is_constant() {
                entries.push((EigenDescriptor::OrbitTag(tag), k - i));
            }
            prev = g;
        }
        debug_assert_eq!(prev, residue, "tags must exhaust the residue");
    }
    Ok(EigenMultiplicityReport {
        matrix_dim: data.matrix_dim,
        entries,
    })
}

/// Largest geometric multiplicity among eigenvalues outside `excluded`;
/// zero when every eigenvalue is excluded. Orbit tags never contain rational
/// values, so exclusion only filters the rational entries.
pub fn max_multiplicity_excluding(
    t: &RationalMatrix,
    excluded: &[Rational],
) -> Result<usize, StructureError> {
    let report = geometric_multiplicities(t)?;
    Ok(report
        .entries
        .iter()
        .filter(|(d, _)| match d {
            EigenDescriptor::Rational(v) => !excluded.contains(v),
            EigenDescriptor::OrbitTag(_) => true,
        })
        .map(|(_, m)| *m)
        .max()
        .unwrap_or(0))
}

/// Jordan chains for a rational eigenvalue, spanning its full generalized
/// eigenspace. Chain tops are chosen greedily from the kernel-power
/// filtration, largest height first, completing to independence at each
/// stage; the result is deterministic.
pub fn jordan_chains(
    t: &RationalMatrix,
    lambda: &Rational,
) -> Result<JordanChainSet, StructureError> {
    if !t.is_square() {
        return Err(ExactError::NonSquare {
            rows: t.rows(),
            cols: t.cols(),
        }
        .into());
    }
    let m = t.rows();
    let nil = t - &RationalMatrix::identity(m).scale(lambda);
    let mut kernels: Vec<RationalMatrix> = vec![RationalMatrix::zeros(m, 0)];
    let mut power = RationalMatrix::identity(m);
    loop {
        power = nil.matmul(&power);
        let kernel = power.kernel_basis();
        let stable = kernel.cols() == kernels.last().unwrap().cols();
        kernels.push(kernel);
        if stable {
            kernels.pop();
            break;
        }
        if kernels.len() > m + 1 {
            break;
        }
    }
    let height = kernels.len() - 1;
    if height == 0 {
        return Err(StructureError::NotAnEigenvalue {
            lambda: crate::exactalg::format_rational(lambda),
        });
    }

    // Descend the filtration: at height e the chain tops extend
    // span(ker N^{e-1}, N * tops-above) to a basis of ker N^e.
    let mut chains: Vec<Vec<Vec<Rational>>> = Vec::new();
    let mut carried: Vec<Vec<Rational>> = Vec::new();
    for e in (1..=height).rev() {
        let mut spanning: Vec<Vec<Rational>> = kernels[e - 1].columns();
        spanning.extend(carried.iter().cloned());
        let mut stack = spanning.clone();
        let mut new_tops: Vec<Vec<Rational>> = Vec::new();
        for cand in kernels[e].columns() {
            let mut trial = stack.clone();
            trial.push(cand.clone());
            let trial_m = RationalMatrix::from_columns(&trial).expect("uniform length");
            if trial_m.rank() == trial.len() {
                stack = trial;
                new_tops.push(cand);
            }
        }
        for top in &new_tops {
            let mut chain = vec![top.clone()];
            for _ in 1..e {
                let prev = chain.last().unwrap();
                chain.push(nil.mul_vec(prev));
            }
            chain.reverse(); // w1 (eigenvector) first
            chains.push(chain);
        }
        carried = carried
            .iter()
            .chain(new_tops.iter())
            .map(|v| nil.mul_vec(v))
            .collect();
    }

    for chain in &mut chains {
        normalize_chain(chain);
    }
    chains.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| vec_lex_cmp(a.last().unwrap(), b.last().unwrap()))
    });

    let set = JordanChainSet {
        eigenvalue: lambda.clone(),
        chains,
    };
    debug_assert_eq!(set.geometric_multiplicity(), kernels[1].cols());
    debug_assert_eq!(set.algebraic_multiplicity(), kernels[height].cols());
    Ok(set)
}

/// Scale a whole chain so the first nonzero entry of its top is 1; chain
/// relations are linear, so they survive the scaling.
fn normalize_chain(chain: &mut [Vec<Rational>]) {
    let top = chain.last().expect("chains are nonempty");
    let Some(lead) = top.iter().find(|v| !v.is_zero()) else {
        return;
    };
    if lead.is_one() {
        return;
    }
    let inv = lead.clone().recip();
    for vec in chain.iter_mut() {
        for v in vec.iter_mut() {
            *v = &*v * &inv;
        }
    }
}

pub(crate) fn vec_lex_cmp(a: &[Rational], b: &[Rational]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = x.cmp(y);
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

/// Full primary cyclic decomposition for a matrix whose characteristic
/// polynomial splits over Q. Errors with `IrrationalSpectrum` otherwise.
/// The union of all chain vectors is a basis of the ambient space.
pub fn rational_jordan_decomposition(
    t: &RationalMatrix,
) -> Result<Vec<CyclicSummand>, StructureError> {
    let cp = charpoly(t)?;
    let (_, roots) = squarefree_and_rational_roots(&cp)?;
    let total: usize = roots.iter().map(|(_, m)| m).sum();
    if total != t.rows() {
        return Err(StructureError::IrrationalSpectrum);
    }
    let mut summands = Vec::new();
    for (root, mult) in &roots {
        let set = jordan_chains(t, root)?;
        debug_assert_eq!(set.algebraic_multiplicity(), *mult);
        for chain in set.chains {
            summands.push(CyclicSummand {
                eigenvalue: root.clone(),
                chain,
            });
        }
    }
    debug_assert_eq!(
        summands.iter().map(|s| s.dimension()).sum::<usize>(),
        t.rows()
    );
    Ok(summands)
}
