//! Univariate polynomials over the rationals, dense in ascending degree.

use super::{format_rational, ExactError, Rational};
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial in one variable `y` over `Q`. Coefficients are stored in
/// ascending degree with a nonzero leading coefficient; the zero polynomial
/// is the empty coefficient vector, and its degree is `None` rather than a
/// numeric sentinel.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyQ {
    coeffs: Vec<Rational>,
}

impl PolyQ {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The variable `y`.
    pub fn y() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    /// `y - root`.
    pub fn linear_root(root: &Rational) -> Self {
        Self::from_coeffs(vec![-root.clone(), Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| super::rat_int(c)).collect())
    }

    /// Monic product of `(y - r)^mult` over the given roots.
    pub fn from_roots(roots: &[(Rational, usize)]) -> Self {
        let mut p = Self::one();
        for (r, mult) in roots {
            let lin = Self::linear_root(r);
            for _ in 0..*mult {
                p = &p * &lin;
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn make_monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self.leading_coeff().recip();
        Self {
            coeffs: self.coeffs.iter().map(|c| c * &inv).collect(),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Euclidean division: `self = q * divisor + r` with
    /// `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), ExactError> {
        if divisor.is_zero() {
            return Err(ExactError::PolyDivisionByZero);
        }
        let dd = divisor.coeffs.len() - 1;
        let lead_inv = divisor.leading_coeff().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() * &lead_inv;
            if !factor.is_zero() {
                for (i, dc) in divisor.coeffs.iter().enumerate() {
                    let v = &rem[k + i] - &(&factor * dc);
                    rem[k + i] = v;
                }
            }
            quot[k] = factor;
            // the leading term cancels exactly
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
            if rem.len() <= dd {
                break;
            }
        }
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Does `self` divide `other` exactly?
    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other
            .div_rem(self)
            .map(|(_, r)| r.is_zero())
            .unwrap_or(false)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("divisor is nonzero in the loop");
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// `p / gcd(p, p')`, normalized monic. Errors on the zero polynomial.
    pub fn squarefree_part(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative());
        if g.is_constant() {
            return Ok(self.make_monic());
        }
        let (q, r) = self.div_rem(&g)?;
        debug_assert!(r.is_zero());
        Ok(q.make_monic())
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).is_constant()
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, rhs: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyQ::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, rhs: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyQ::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, rhs: &PolyQ) -> PolyQ {
        if self.is_zero() || rhs.is_zero() {
            return PolyQ::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let v = &out[i + j] + &(a * b);
                out[i + j] = v;
            }
        }
        PolyQ::from_coeffs(out)
    }
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = format_rational(c);
            let (sign, mag) = match cs.strip_prefix('-') {
                Some(rest) => ("-", rest.to_string()),
                None => ("+", cs),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != "1" {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "y")?;
                    } else {
                        write!(f, "y^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, rat_int};

    #[test]
    fn zero_polynomial_sentinel() {
        assert_eq!(PolyQ::zero().degree(), None);
        assert_eq!(PolyQ::from_int_coeffs(&[0, 0]).degree(), None);
        assert_eq!(PolyQ::one().degree(), Some(0));
        assert_eq!(PolyQ::y().degree(), Some(1));
    }

    #[test]
    fn div_rem_roundtrip() {
        let a = PolyQ::from_int_coeffs(&[2, 0, -3, 1, 4]);
        let b = PolyQ::from_int_coeffs(&[1, 2, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree() < b.degree());
        assert!(a.div_rem(&PolyQ::zero()).is_err());
    }

    #[test]
    fn gcd_of_shared_factor() {
        let shared = PolyQ::from_int_coeffs(&[-1, 1]); // y - 1
        let a = &shared * &PolyQ::from_int_coeffs(&[1, 1]);
        let b = &shared * &PolyQ::from_int_coeffs(&[2, 0, 1]);
        assert_eq!(a.gcd(&b), shared);
        assert_eq!(PolyQ::zero().gcd(&PolyQ::zero()), PolyQ::zero());
        // gcd is monic even for non-monic inputs
        let c = a.scale(&rat(3, 7));
        assert!(c.gcd(&b).is_monic());
    }

    #[test]
    fn squarefree_part_strips_multiplicity() {
        // (y-1)^2 (y+2)
        let p = PolyQ::from_roots(&[(rat_int(1), 2), (rat_int(-2), 1)]);
        let sf = p.squarefree_part().unwrap();
        assert_eq!(sf, PolyQ::from_roots(&[(rat_int(1), 1), (rat_int(-2), 1)]));
        assert!(sf.is_squarefree());
        assert!(!p.is_squarefree());
        assert!(PolyQ::zero().squarefree_part().is_err());
    }

    #[test]
    fn eval_horner() {
        let p = PolyQ::from_int_coeffs(&[1, 0, 1]); // y^2 + 1
        assert_eq!(p.eval(&rat_int(2)), rat_int(5));
        assert_eq!(p.eval(&rat(1, 2)), rat(5, 4));
    }

    #[test]
    fn display_is_readable() {
        let p = PolyQ::from_int_coeffs(&[1, 0, 0, 0, 1]);
        assert_eq!(format!("{p}"), "y^4 + 1");
        let q = PolyQ::from_coeffs(vec![rat(-1, 2), rat_int(0), rat_int(-3)]);
        assert_eq!(format!("{q}"), "-3*y^2 - 1/2");
    }
}
