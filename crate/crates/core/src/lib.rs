//! Exact-arithmetic toolkit for homomorphic sensing uniqueness.
//!
//! Given two linear views `t1(v1) = t2(v2)` of points drawn from a common
//! subspace, the question is when the equality forces `v1 = v2` (or
//! `v1 = ±v2` once sign flips are allowed). This crate certifies sufficient
//! conditions for that uniqueness with exact rational arithmetic, builds
//! explicit witness subspaces when the eigenstructure permits, and validates
//! every certified claim against a brute-force oracle at desk scale.
//!
//! Module layout:
//!
//! * [`exactalg`] — rationals, rational matrices, univariate polynomials and
//!   Smith normal form over `Q[y]`.
//! * [`structure`] — invariant factors, eigenvalue multiplicities, Jordan
//!   chains of an endomorphism.
//! * [`permcodim`] — signed permutations, coordinate projections and the
//!   combinatorial codimension accounting.
//! * [`construct`] — constructive witness subspaces `V` with
//!   `dim(V + t(V)) = 2n`.
//! * [`certify`] — top-level uniqueness certifiers producing machine-checkable
//!   verdicts.
//! * [`sensing`] — instance generation and the exhaustive collision oracle.

pub mod certify;
pub mod construct;
pub mod exactalg;
pub mod permcodim;
pub mod sensing;
pub mod structure;

pub use certify::{Evidence, Route, SignMode, UniquenessCertificate, Verdict};
pub use construct::WitnessSubspace;
pub use exactalg::{PolyMatrix, PolyQ, Rational, RationalMatrix};
pub use permcodim::{CodimAccount, CoordinateProjection, CycleDecomposition, SignedPermutation};
pub use sensing::{CollisionReport, SensingInstance, TransformClass};
pub use structure::{EigenDescriptor, EigenMultiplicityReport, InvariantFactorData, JordanChainSet};
