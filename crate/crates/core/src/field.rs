//! Arithmetic contexts: prime fields with a single-word modulus and the
//! exact rationals. Series, polynomials and operators are generic over a
//! [`Field`], carried by value since the prime modulus is runtime data.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::modarith::{ModArithError, PrimeContext};

/// A field of coefficients, carried as a value so that a prime modulus can
/// travel with the data it governs.
pub trait Field: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// Image of an exact rational; `None` when the denominator is not
    /// invertible (prime divides it).
    fn from_rational(&self, r: &BigRational) -> Option<Self::Elem>;
    /// The characteristic, `Some(p)` for prime fields, `None` for Q.
    fn characteristic(&self) -> Option<u64>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow_u64(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// The prime field F_p for a validated odd prime p < 2^31.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fp(pub PrimeContext);

impl Fp {
    pub fn new(p: u64) -> Result<Self, ModArithError> {
        Ok(Fp(PrimeContext::new(p)?))
    }

    pub fn modulus(&self) -> u64 {
        self.0.modulus()
    }

    pub fn ctx(&self) -> PrimeContext {
        self.0
    }
}

impl Field for Fp {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        self.0.add(*a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        self.0.sub(*a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        self.0.neg(*a)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.0.mul(*a, *b)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        self.0.inv(*a).ok()
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.0.reduce_i64(n)
    }
    fn from_rational(&self, r: &BigRational) -> Option<u64> {
        let num = self.0.reduce_bigint(r.numer());
        let den = self.0.reduce_bigint(r.denom());
        self.0.inv(den).ok().map(|di| self.0.mul(num, di))
    }
    fn characteristic(&self) -> Option<u64> {
        Some(self.0.modulus())
    }
}

/// The exact rational numbers.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_rational(&self, r: &BigRational) -> Option<BigRational> {
        Some(r.clone())
    }
    fn characteristic(&self) -> Option<u64> {
        None
    }
}

/// Rational `n/d` from integer parts, reduced with a positive denominator.
pub fn big_ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// gcd-reduced content data of a slice of rationals: a common rational
/// factor `c` such that dividing by `c` leaves coprime integers with the
/// convention that the content of the zero slice is 1.
pub fn rational_content(values: &[BigRational]) -> BigRational {
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for v in values {
        if v.is_zero() {
            continue;
        }
        num_gcd = num_gcd.gcd(&v.numer().abs());
        den_lcm = den_lcm.lcm(v.denom());
    }
    if num_gcd.is_zero() {
        BigRational::one()
    } else {
        BigRational::new(num_gcd, den_lcm)
    }
}
