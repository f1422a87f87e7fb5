//! Squarefree decomposition and exact rational-root extraction.
//!
//! Roots are found on the primitive integer form of the squarefree part:
//! roots modulo a good small prime, Newton lifting to a modulus that
//! dominates the coefficient bound for linear factors, then rational
//! reconstruction. Every candidate is verified by exact evaluation, so a
//! reported root is a root and no rational root can be missed.

use super::{ExactError, PolyQ, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Returns `(squarefree_part, roots)` where the squarefree part is
/// `p / gcd(p, p')` normalized monic, and `roots` lists every rational root
/// of `p` with its algebraic multiplicity, sorted ascending.
pub fn squarefree_and_rational_roots(
    p: &PolyQ,
) -> Result<(PolyQ, Vec<(Rational, usize)>), ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let sf = p.squarefree_part()?;
    let mut roots = rational_roots_squarefree(&sf);
    roots.sort();
    let with_mult = roots
        .into_iter()
        .map(|r| {
            let lin = PolyQ::linear_root(&r);
            let mut mult = 0usize;
            let mut rem = p.clone();
            loop {
                let (q, rest) = rem.div_rem(&lin).expect("linear divisor is nonzero");
                if !rest.is_zero() {
                    break;
                }
                mult += 1;
                rem = q;
            }
            debug_assert!(mult >= 1);
            (r, mult)
        })
        .collect();
    Ok((sf, with_mult))
}

/// All rational roots of a squarefree polynomial (each with multiplicity 1).
fn rational_roots_squarefree(sf: &PolyQ) -> Vec<Rational> {
    let Some(deg) = sf.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let mut coeffs = primitive_integer_coeffs(sf);
    let mut roots = Vec::new();
    if coeffs[0].is_zero() {
        // squarefree, so y divides exactly once
        roots.push(Rational::zero());
        coeffs.remove(0);
    }
    match coeffs.len() - 1 {
        0 => {}
        1 => {
            roots.push(Rational::new(-coeffs[0].clone(), coeffs[1].clone()));
        }
        _ => {
            for cand in hensel_linear_factors(&coeffs) {
                if sf.eval(&cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}

/// Clear denominators and divide by the integer content; the sign of the
/// leading coefficient is normalized positive.
fn primitive_integer_coeffs(p: &PolyQ) -> Vec<BigInt> {
    let mut den_lcm = BigInt::one();
    for c in p.coeffs() {
        den_lcm = den_lcm.lcm(c.denom());
    }
    let mut ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&den_lcm / c.denom()))
        .collect();
    let mut content = BigInt::zero();
    for v in &ints {
        content = content.gcd(v);
    }
    if !content.is_zero() {
        for v in &mut ints {
            *v /= &content;
        }
    }
    if ints.last().is_some_and(|l| l.is_negative()) {
        for v in &mut ints {
            *v = -v.clone();
        }
    }
    ints
}

/// Candidate rational roots of a primitive squarefree integer polynomial
/// with nonzero constant term and degree >= 2. Verification happens at the
/// caller; this only has to be complete.
fn hensel_linear_factors(coeffs: &[BigInt]) -> Vec<Rational> {
    // Coefficient bound for a linear factor v*y - u: max(|u|, |v|) <= 2*||P||_2.
    let norm_sq: BigInt = coeffs.iter().map(|c| c * c).sum();
    let bound: BigInt = (norm_sq.sqrt() + 1) * 2;
    let target: BigInt = &bound * &bound * 2 + 1;

    let p = find_good_prime(coeffs);
    let coeffs_mod: Vec<u64> = coeffs.iter().map(|c| to_mod(c, p)).collect();
    let deriv_mod = derivative_mod(&coeffs_mod, p);

    let mut out = Vec::new();
    for r in 0..p {
        if eval_mod(&coeffs_mod, r, p) != 0 {
            continue;
        }
        debug_assert_ne!(eval_mod(&deriv_mod, r, p), 0, "root must be simple mod p");
        let lifted = newton_lift(coeffs, BigInt::from(r), BigInt::from(p), &target);
        if let Some(candidate) = rational_reconstruct(&lifted.0, &lifted.1, &bound) {
            out.push(candidate);
        }
    }
    out
}

/// Smallest prime >= 10007 that keeps the degree and squarefreeness of the
/// reduction. Such a prime exists because the discriminant is nonzero.
fn find_good_prime(coeffs: &[BigInt]) -> u64 {
    let mut p = 10007u64;
    loop {
        if is_prime(p) && !(coeffs.last().unwrap() % p).is_zero() {
            let cm: Vec<u64> = coeffs.iter().map(|c| to_mod(c, p)).collect();
            let dm = derivative_mod(&cm, p);
            if poly_gcd_mod(&cm, &dm, p).len() == 1 {
                return p;
            }
        }
        p += 2;
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn to_mod(v: &BigInt, p: u64) -> u64 {
    let m = v.mod_floor(&BigInt::from(p));
    let (_, digits) = m.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}

fn eval_mod(coeffs: &[u64], x: u64, p: u64) -> u64 {
    let mut acc: u128 = 0;
    for c in coeffs.iter().rev() {
        acc = (acc * x as u128 + *c as u128) % p as u128;
    }
    acc as u64
}

fn derivative_mod(coeffs: &[u64], p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| ((*c as u128 * k as u128) % p as u128) as u64)
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    if out.is_empty() {
        out.push(0);
    }
    out
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0 mod p.
    let mut result: u128 = 1;
    let mut base = a as u128 % p as u128;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    result as u64
}

/// Monic gcd of two polynomials mod p, coefficients ascending; the constant
/// polynomial 1 comes back as `vec![1]`.
fn poly_gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let trim = |mut v: Vec<u64>| -> Vec<u64> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        // a mod b
        let lead_inv = inv_mod_u64(*b.last().unwrap(), p) as u128;
        while a.len() >= b.len() && !a.is_empty() {
            let shift = a.len() - b.len();
            let factor = (*a.last().unwrap() as u128 * lead_inv) % p as u128;
            if factor != 0 {
                for (i, bc) in b.iter().enumerate() {
                    let sub = factor * *bc as u128 % p as u128;
                    let idx = shift + i;
                    a[idx] = ((a[idx] as u128 + p as u128 - sub) % p as u128) as u64;
                }
            }
            a.pop();
            a = trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    if a.is_empty() {
        return vec![0];
    }
    let inv = inv_mod_u64(*a.last().unwrap(), p) as u128;
    a.iter().map(|c| ((*c as u128 * inv) % p as u128) as u64).collect()
}

fn eval_big_mod(coeffs: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * x + c).mod_floor(m);
    }
    acc
}

fn inv_big_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Newton-lift a simple root mod p until the modulus reaches `target`.
/// Returns `(root, modulus)`.
fn newton_lift(coeffs: &[BigInt], root: BigInt, modulus: BigInt, target: &BigInt) -> (BigInt, BigInt) {
    let deriv: Vec<BigInt> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigInt::from(k))
        .collect();
    let mut x = root;
    let mut m = modulus;
    while &m < target {
        let next = &m * &m;
        let fx = eval_big_mod(coeffs, &x, &next);
        let dfx = eval_big_mod(&deriv, &x, &next);
        let inv = inv_big_mod(&dfx, &next).expect("derivative stays invertible while lifting");
        x = (&x - fx * inv).mod_floor(&next);
        m = next;
    }
    (x, m)
}

/// Wang-style rational reconstruction: the unique `u/v` with
/// `|u|, |v| <= bound`, `v > 0`, and `u = v * x (mod m)`, when it exists.
fn rational_reconstruct(x: &BigInt, m: &BigInt, bound: &BigInt) -> Option<Rational> {
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() || t1.abs() > *bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, rat_int};

    fn roots_of(p: &PolyQ) -> Vec<(Rational, usize)> {
        squarefree_and_rational_roots(p).unwrap().1
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert!(squarefree_and_rational_roots(&PolyQ::zero()).is_err());
    }

    #[test]
    fn repeated_and_simple_roots() {
        let p = PolyQ::from_roots(&[(rat_int(1), 2), (rat_int(-2), 1)]);
        let (sf, roots) = squarefree_and_rational_roots(&p).unwrap();
        assert_eq!(sf, PolyQ::from_roots(&[(rat_int(1), 1), (rat_int(-2), 1)]));
        assert_eq!(roots, vec![(rat_int(-2), 1), (rat_int(1), 2)]);
    }

    #[test]
    fn irreducible_quadratic_and_quartic() {
        let p = PolyQ::from_int_coeffs(&[1, 0, 1]); // y^2 + 1
        let (sf, roots) = squarefree_and_rational_roots(&p).unwrap();
        assert_eq!(sf, p);
        assert!(roots.is_empty());

        let q = PolyQ::from_int_coeffs(&[1, 0, 0, 0, 1]); // y^4 + 1
        let (sf, roots) = squarefree_and_rational_roots(&q).unwrap();
        assert_eq!(sf, q);
        assert!(sf.is_squarefree());
        assert!(roots.is_empty());
    }

    #[test]
    fn fractional_roots_and_zero_root() {
        // y * (2y - 3) * (3y + 5)^2, scaled by 1/7
        let p = PolyQ::from_roots(&[(rat_int(0), 1), (rat(3, 2), 1), (rat(-5, 3), 2)])
            .scale(&rat(1, 7));
        let roots = roots_of(&p);
        assert_eq!(
            roots,
            vec![(rat(-5, 3), 2), (rat_int(0), 1), (rat(3, 2), 1)]
        );
    }

    #[test]
    fn mixed_rational_and_irrational() {
        // (y - 17/13)(y^2 - 2)(y + 4)
        let p = &PolyQ::from_roots(&[(rat(17, 13), 1), (rat_int(-4), 1)])
            * &PolyQ::from_int_coeffs(&[-2, 0, 1]);
        let roots = roots_of(&p);
        assert_eq!(roots, vec![(rat_int(-4), 1), (rat(17, 13), 1)]);
    }

    #[test]
    fn moderately_large_coefficients() {
        // (97y - 1001)(89y + 2023)(y^2 + y + 1)
        let p = &(&PolyQ::from_coeffs(vec![rat_int(-1001), rat_int(97)])
            * &PolyQ::from_coeffs(vec![rat_int(2023), rat_int(89)]))
            * &PolyQ::from_int_coeffs(&[1, 1, 1]);
        let roots = roots_of(&p);
        assert_eq!(roots, vec![(rat(-2023, 89), 1), (rat(1001, 97), 1)]);
    }
}
