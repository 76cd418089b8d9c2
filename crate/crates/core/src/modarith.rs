//! Prime-field arithmetic, Chinese remaindering and rational number
//! reconstruction.
//!
//! The prime family defaults to 2^15 - {19, 49, 51, 55}; any prime below
//! 2^31 is accepted so that all field products fit in a u64 without
//! widening.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// The 15-bit primes used throughout: 2^15 - 19, -49, -51, -55.
pub const DEFAULT_PRIMES: [u64; 4] = [32749, 32719, 32717, 32713];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModArithError {
    #[error("NotPrime: {0} is not an odd prime below 2^31")]
    NotPrime(u64),
    #[error("ZeroInverse: no inverse of zero")]
    ZeroInverse,
    #[error("NonCoprimeModuli: moduli {0} and {1} share a factor")]
    NonCoprimeModuli(u64, u64),
    #[error("NoReconstruction: no rational meets 2*max(|n|,d)^2 < m")]
    NoReconstruction,
    #[error("ScaleNotInvertible: scale shares a factor with the modulus")]
    ScaleNotInvertible,
    #[error("EmptyResidueSystem")]
    EmptyResidueSystem,
}

/// A validated odd prime modulus below 2^31 with its field operations.
///
/// Elements are canonical u64 values in `[0, p)`; products stay below
/// 2^62 so no 128-bit arithmetic is needed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PrimeContext {
    p: u64,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self, ModArithError> {
        if p < (1 << 31) && p > 2 && is_prime_u64(p) {
            Ok(PrimeContext { p })
        } else {
            Err(ModArithError::NotPrime(p))
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            base = self.mul(base, base);
        }
        acc
    }

    /// Inverse by extended Euclid.
    pub fn inv(&self, a: u64) -> Result<u64, ModArithError> {
        if a == 0 {
            return Err(ModArithError::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.p as i64, (a % self.p) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "modulus is prime so gcd must be 1");
        Ok(t0.rem_euclid(self.p as i64) as u64)
    }

    #[inline]
    pub fn reduce_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    pub fn reduce_bigint(&self, n: &BigInt) -> u64 {
        let m = n.mod_floor(&BigInt::from(self.p));
        m.to_u64().expect("mod_floor result fits u64")
    }

    /// Signed lift to `(-p/2, p/2]`.
    pub fn lift_signed(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

/// Deterministic Miller-Rabin, valid for all n < 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut acc = 1u64;
        a %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, a);
            }
            e >>= 1;
            a = mulmod(a, a);
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The next prime >= n that keeps `PrimeContext::new` happy.
pub fn next_prime_at_least(mut n: u64) -> u64 {
    if n <= 3 {
        return 3;
    }
    if n % 2 == 0 {
        n += 1;
    }
    while !is_prime_u64(n) {
        n += 2;
    }
    n
}

/// A reduced rational: coprime parts, denominator >= 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rational {
    numerator: BigInt,
    denominator: BigInt,
}

impl Rational {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        let mut n = numerator;
        let mut d = denominator;
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if !g.is_one() && !g.is_zero() {
            n /= &g;
            d /= &g;
        }
        if n.is_zero() {
            d = BigInt::one();
        }
        Rational { numerator: n, denominator: d }
    }

    pub fn from_i64(n: i64, d: i64) -> Self {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn to_big_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), self.denominator.clone())
    }

    /// Residue mod m, when the denominator is invertible there.
    pub fn reduce_mod(&self, m: &BigUint) -> Option<BigUint> {
        let mi = BigInt::from(m.clone());
        let d = self.denominator.mod_floor(&mi);
        let dinv = mod_inverse_big(&d, &mi)?;
        let n = self.numerator.mod_floor(&mi);
        Some((n * dinv).mod_floor(&mi).to_biguint().unwrap())
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.denominator.is_one() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

fn mod_inverse_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Residues of one value under several pairwise coprime moduli.
#[derive(Clone, Debug, Default)]
pub struct ResidueSystem {
    residues: Vec<(u64, u64)>,
}

impl ResidueSystem {
    pub fn new() -> Self {
        ResidueSystem { residues: Vec::new() }
    }

    pub fn push(&mut self, value: u64, modulus: u64) {
        assert!(modulus > 0 && value < modulus, "residue out of range");
        self.residues.push((value, modulus));
    }

    pub fn from_pairs(pairs: &[(u64, u64)]) -> Self {
        let mut rs = ResidueSystem::new();
        for &(v, m) in pairs {
            rs.push(v, m);
        }
        rs
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.residues
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

/// Inverse of `a` mod p via the context. Kept as a free function since it
/// is the shape the reconstruction code wants.
pub fn mod_inverse(a: u64, ctx: &PrimeContext) -> Result<u64, ModArithError> {
    ctx.inv(a)
}

/// Chinese remainder combination: the unique x in `[0, prod m_i)` matching
/// every residue.
pub fn crt_combine(rs: &ResidueSystem) -> Result<(BigUint, BigUint), ModArithError> {
    if rs.is_empty() {
        return Err(ModArithError::EmptyResidueSystem);
    }
    let mut x = BigInt::from(rs.pairs()[0].0);
    let mut m = BigInt::from(rs.pairs()[0].1);
    for &(v, mi) in &rs.pairs()[1..] {
        let mi_big = BigInt::from(mi);
        let g = m.gcd(&mi_big);
        if !g.is_one() {
            return Err(ModArithError::NonCoprimeModuli(
                g.to_u64().unwrap_or(0),
                mi,
            ));
        }
        // x' = x + m * t with t = (v - x)/m mod mi
        let minv = mod_inverse_big(&m.mod_floor(&mi_big), &mi_big).unwrap();
        let t = ((BigInt::from(v) - &x) * minv).mod_floor(&mi_big);
        x += &m * t;
        m *= mi_big;
    }
    Ok((x.to_biguint().unwrap(), m.to_biguint().unwrap()))
}

/// Bounded extended-Euclid (Wang) rational reconstruction: the unique n/d
/// with n/d = u (mod m), gcd(d, m) = 1 and 2*max(|n|, d)^2 < m, when one
/// exists.
pub fn rational_reconstruct(u: &BigUint, m: &BigUint) -> Result<Rational, ModArithError> {
    let m_big = BigInt::from(m.clone());
    let u_big = BigInt::from(u.clone()).mod_floor(&m_big);
    let (mut r0, mut r1) = (m_big.clone(), u_big);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    // stop at the first remainder with 2 r^2 < m
    while &r1 * &r1 * 2 >= m_big {
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let (mut n, mut d) = (r1, t1);
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    if d.is_zero() {
        return Err(ModArithError::NoReconstruction);
    }
    let bound_n = n.abs().max(d.clone());
    if &bound_n * &bound_n * 2 >= m_big {
        return Err(ModArithError::NoReconstruction);
    }
    if !n.gcd(&d).is_one() || !d.gcd(&m_big).is_one() {
        return Err(ModArithError::NoReconstruction);
    }
    Ok(Rational::new(n, d))
}

/// Reconstruction after multiplying the residue by a scale factor, then
/// dividing the recovered rational by the scale. Succeeds whenever the
/// true rational times `scale` meets the Wang bound.
pub fn scaled_reconstruct(
    u: &BigUint,
    m: &BigUint,
    scale: &BigUint,
) -> Result<Rational, ModArithError> {
    let m_big = BigInt::from(m.clone());
    let s = BigInt::from(scale.clone());
    if !s.gcd(&m_big).is_one() {
        return Err(ModArithError::ScaleNotInvertible);
    }
    let su = (BigInt::from(u.clone()) * &s)
        .mod_floor(&m_big)
        .to_biguint()
        .unwrap();
    let r = rational_reconstruct(&su, m)?;
    Ok(Rational::new(
        r.numerator().clone(),
        r.denominator() * s,
    ))
}
