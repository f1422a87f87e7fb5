//! Exact arithmetic foundation: rationals, dense rational matrices,
//! univariate polynomials over the rationals, and Smith normal form over the
//! polynomial ring `Q[y]`.
//!
//! Everything here is a pure function over immutable values; there is no
//! floating point anywhere.

mod bareiss;
mod matrix;
mod poly;
mod polymatrix;
mod roots;

pub use bareiss::{int_rank, rows_reduce_to_zero, EchelonWorkspace, IntRowSpace};
pub use matrix::{RationalMatrix, RrefResult};
pub use poly::PolyQ;
pub use polymatrix::{charpoly, PolyMatrix, SmithNormalForm};
pub use roots::squarefree_and_rational_roots;

use num_bigint::BigInt;
use thiserror::Error;

/// Arbitrary-precision rational scalar. Always stored reduced with a
/// positive denominator; zero is `0/1`.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("ragged rows: row {row} has {got} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("the zero polynomial has no squarefree part or roots")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    PolyDivisionByZero,
    #[error("invalid rational literal `{text}`: {reason}")]
    InvalidRational { text: String, reason: String },
}

/// Shorthand rational constructor for integer literals.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand rational constructor. Panics on a zero denominator; intended
/// for literals in code and tests, not for parsing input.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "rat() requires a nonzero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `"p/q"` or `"p"` into a reduced rational. Rejects zero denominators
/// and malformed integers instead of panicking.
pub fn parse_rational(text: &str) -> Result<Rational, ExactError> {
    let bad = |reason: &str| ExactError::InvalidRational {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let mut parts = text.splitn(2, '/');
    let num_str = parts.next().unwrap().trim();
    let num: BigInt = num_str.parse().map_err(|_| bad("numerator is not an integer"))?;
    match parts.next() {
        None => Ok(Rational::from_integer(num)),
        Some(den_str) => {
            let den: BigInt = den_str
                .trim()
                .parse()
                .map_err(|_| bad("denominator is not an integer"))?;
            if den == BigInt::from(0) {
                return Err(bad("zero denominator"));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Canonical display form: `"p/q"`, or just `"p"` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_reduces_and_normalizes_sign() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4/8").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("4/-8").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert_eq!(format_rational(&rat(10, 4)), "5/2");
        assert_eq!(format_rational(&rat_int(-3)), "-3");
        assert_eq!(format_rational(&rat(0, 5)), "0");
    }

    #[test]
    fn parse_rejects_zero_denominator() {
        assert!(matches!(
            parse_rational("1/0"),
            Err(ExactError::InvalidRational { .. })
        ));
        assert!(parse_rational("a/2").is_err());
        assert!(parse_rational("1/b").is_err());
    }

    #[test]
    fn roundtrip_is_canonical() {
        for s in ["5/2", "-3", "0", "22/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }
}
