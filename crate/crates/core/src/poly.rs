//! Dense univariate polynomials over a [`Field`], plus reduced rational
//! functions. These back the coefficient arithmetic of differential
//! operators.

use crate::field::Field;

/// Dense polynomial; `coeffs[i]` multiplies w^i, no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<F: Field> {
    pub field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> Poly<F> {
    pub fn new(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while let Some(last) = coeffs.last() {
            if field.is_zero(last) {
                coeffs.pop();
            } else {
                break;
            }
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: F) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: F) -> Self {
        let c = field.one();
        Poly { field, coeffs: vec![c] }
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Poly::new(field, vec![c])
    }

    pub fn monomial(field: F, c: F::Elem, deg: usize) -> Self {
        let mut v = vec![field.zero(); deg + 1];
        v[deg] = c;
        Poly::new(field, v)
    }

    pub fn from_i64(field: F, coeffs: &[i64]) -> Self {
        let v = coeffs.iter().map(|&c| field.from_i64(c)).collect();
        Poly::new(field, v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for the zero polynomial by convention (check `is_zero`).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading(&self) -> F::Elem {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Number of leading zero coefficients (w-adic valuation); degree+1
    /// bound for the zero polynomial.
    pub fn valuation(&self) -> usize {
        for (i, c) in self.coeffs.iter().enumerate() {
            if !self.field.is_zero(c) {
                return i;
            }
        }
        self.coeffs.len()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(f.add(&self.coeff(i), &rhs.coeff(i)));
        }
        Poly::new(f.clone(), v)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(f.sub(&self.coeff(i), &rhs.coeff(i)));
        }
        Poly::new(f.clone(), v)
    }

    pub fn neg(&self) -> Self {
        let v = self.coeffs.iter().map(|c| self.field.neg(c)).collect();
        Poly { field: self.field.clone(), coeffs: v }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let v = self.coeffs.iter().map(|x| self.field.mul(x, c)).collect();
        Poly::new(self.field.clone(), v)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.field.clone());
        }
        let f = &self.field;
        let mut v = vec![f.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if f.is_zero(b) {
                    continue;
                }
                v[i + j] = f.add(&v[i + j], &f.mul(a, b));
            }
        }
        Poly::new(f.clone(), v)
    }

    /// Multiply by w^k.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![self.field.zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { field: self.field.clone(), coeffs: v }
    }

    /// Exact division by w^k; panics if the valuation is smaller.
    pub fn shift_down(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        assert!(self.valuation() >= k, "shift_down below valuation");
        Poly::new(self.field.clone(), self.coeffs[k..].to_vec())
    }

    /// Euclidean division: (quotient, remainder) with deg r < deg rhs.
    pub fn divrem(&self, rhs: &Self) -> (Self, Self) {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        let f = self.field.clone();
        if self.is_zero() || self.coeffs.len() < rhs.coeffs.len() {
            return (Poly::zero(f), self.clone());
        }
        let lead_inv = f.inv(&rhs.leading()).expect("nonzero leading");
        let mut rem = self.coeffs.clone();
        let dq = self.coeffs.len() - rhs.coeffs.len();
        let mut q = vec![f.zero(); dq + 1];
        for k in (0..=dq).rev() {
            let top = rem[k + rhs.coeffs.len() - 1].clone();
            if f.is_zero(&top) {
                continue;
            }
            let c = f.mul(&top, &lead_inv);
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let t = f.mul(&c, b);
                rem[k + j] = f.sub(&rem[k + j], &t);
            }
            q[k] = c;
        }
        (Poly::new(f.clone(), q), Poly::new(f, rem))
    }

    pub fn rem(&self, rhs: &Self) -> Self {
        self.divrem(rhs).1
    }

    /// Monic gcd via Euclid.
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = std::mem::replace(&mut b, r);
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(&self.leading()).unwrap();
        self.scale(&inv)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.field.clone());
        }
        let f = &self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(&f.from_i64(i as i64), c))
            .collect();
        Poly::new(f.clone(), v)
    }

    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.add(&f.mul(&acc, x), c);
        }
        acc
    }

    /// Taylor shift: p(w) -> p(w + c).
    pub fn shift_argument(&self, c: &F::Elem) -> Self {
        let f = self.field.clone();
        if self.is_zero() || f.is_zero(c) {
            return self.clone();
        }
        // Horner on p(w) viewed at w = (x + c)
        let mut acc = Poly::zero(f.clone());
        let shift = Poly::new(f.clone(), vec![c.clone(), f.one()]);
        for coeff in self.coeffs.iter().rev() {
            acc = acc.mul(&shift);
            acc = acc.add(&Poly::constant(f.clone(), coeff.clone()));
        }
        acc
    }

    /// Reversal to fixed length n+1: w^n * p(1/w).
    pub fn reverse_to(&self, n: usize) -> Self {
        assert!(n >= self.degree() || self.is_zero());
        let f = &self.field;
        let mut v = vec![f.zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[n - i] = c.clone();
        }
        Poly::new(f.clone(), v)
    }

    /// Substitute w -> c*w.
    pub fn scale_argument(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        let mut factor = f.one();
        let v = self
            .coeffs
            .iter()
            .map(|x| {
                let r = f.mul(x, &factor);
                factor = f.mul(&factor, c);
                r
            })
            .collect();
        Poly::new(f.clone(), v)
    }

    /// Substitute w -> c*w^m (m >= 1).
    pub fn compose_monomial(&self, c: &F::Elem, m: usize) -> Self {
        assert!(m >= 1);
        let f = &self.field;
        let mut v = vec![f.zero(); self.coeffs.len().saturating_sub(1) * m + 1];
        let mut factor = f.one();
        for (i, x) in self.coeffs.iter().enumerate() {
            v[i * m] = f.mul(x, &factor);
            factor = f.mul(&factor, c);
        }
        Poly::new(f.clone(), v)
    }

    pub fn pow(&self, mut e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one(self.field.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// A reduced rational function num/den with monic denominator.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFn<F: Field> {
    pub num: Poly<F>,
    pub den: Poly<F>,
}

impl<F: Field> RatFn<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFn { num, den };
        r.reduce();
        r
    }

    pub fn from_poly(num: Poly<F>) -> Self {
        let den = Poly::one(num.field.clone());
        RatFn { num, den }
    }

    pub fn zero(field: F) -> Self {
        RatFn { num: Poly::zero(field.clone()), den: Poly::one(field) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one(self.num.field.clone());
            return;
        }
        let g = self.num.gcd(&self.den);
        if !g.is_zero() && g.degree() > 0 {
            self.num = self.num.divrem(&g).0;
            self.den = self.den.divrem(&g).0;
        }
        // monic denominator
        let lc = self.den.leading();
        let f = self.num.field.clone();
        if !f.is_one(&lc) {
            let inv = f.inv(&lc).unwrap();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        RatFn::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        RatFn::new(
            self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn neg(&self) -> Self {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        RatFn::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    pub fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RatFn::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    pub fn derivative(&self) -> Self {
        let n = self.num.derivative().mul(&self.den);
        let d = self.num.mul(&self.den.derivative());
        RatFn::new(n.sub(&d), self.den.mul(&self.den))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        RatFn { num: self.num.scale(c), den: self.den.clone() }
    }
}

/// The fraction field F(w) of rational functions, as a [`Field`] in its
/// own right so generic linear algebra can run over it.
#[derive(Clone, PartialEq, Debug)]
pub struct FracField<F: Field>(pub F);

impl<F: Field> Field for FracField<F> {
    type Elem = RatFn<F>;

    fn zero(&self) -> RatFn<F> {
        RatFn::zero(self.0.clone())
    }
    fn one(&self) -> RatFn<F> {
        RatFn::from_poly(Poly::one(self.0.clone()))
    }
    fn is_zero(&self, a: &RatFn<F>) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &RatFn<F>, b: &RatFn<F>) -> RatFn<F> {
        a.add(b)
    }
    fn sub(&self, a: &RatFn<F>, b: &RatFn<F>) -> RatFn<F> {
        a.sub(b)
    }
    fn neg(&self, a: &RatFn<F>) -> RatFn<F> {
        a.neg()
    }
    fn mul(&self, a: &RatFn<F>, b: &RatFn<F>) -> RatFn<F> {
        a.mul(b)
    }
    fn inv(&self, a: &RatFn<F>) -> Option<RatFn<F>> {
        if a.is_zero() {
            None
        } else {
            Some(RatFn::new(a.den.clone(), a.num.clone()))
        }
    }
    fn from_i64(&self, n: i64) -> RatFn<F> {
        RatFn::from_poly(Poly::constant(self.0.clone(), self.0.from_i64(n)))
    }
    fn from_rational(&self, r: &num_rational::BigRational) -> Option<RatFn<F>> {
        self.0
            .from_rational(r)
            .map(|c| RatFn::from_poly(Poly::constant(self.0.clone(), c)))
    }
    fn characteristic(&self) -> Option<u64> {
        self.0.characteristic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rationals};

    fn fp() -> Fp {
        Fp::new(32749).unwrap()
    }

    #[test]
    fn mul_and_divrem_round_trip() {
        let f = fp();
        let a = Poly::from_i64(f, &[3, 0, 1, 7]);
        let b = Poly::from_i64(f, &[1, 2]);
        let p = a.mul(&b);
        let (q, r) = p.divrem(&b);
        assert!(r.is_zero());
        assert_eq!(q, a);
    }

    #[test]
    fn gcd_of_common_factor() {
        let f = fp();
        let a = Poly::from_i64(f, &[1, 1]); // 1 + w
        let b = Poly::from_i64(f, &[2, 3, 1]); // (1+w)(2+w)
        let c = Poly::from_i64(f, &[0, 1]).mul(&a); // w(1+w)
        assert_eq!(b.gcd(&c), a.monic());
    }

    #[test]
    fn shift_argument_matches_eval() {
        let f = fp();
        let p = Poly::from_i64(f, &[5, -2, 0, 1]);
        let s = p.shift_argument(&7);
        for x in [0u64, 1, 2, 100] {
            assert_eq!(s.eval(&x), p.eval(&f.0.add(x, 7)));
        }
    }

    #[test]
    fn rational_function_reduction() {
        let q = Rationals;
        let num = Poly::from_i64(q, &[0, 2, 2]); // 2w(1+w)
        let den = Poly::from_i64(q, &[0, 0, 4]); // 4w^2
        let r = RatFn::new(num, den);
        assert_eq!(r.num, Poly::from_i64(q, &[1, 1]).scale(&q.from_i64(1).clone()).scale(&crate::field::big_ratio(1, 2)));
        assert_eq!(r.den, Poly::from_i64(q, &[0, 1]));
    }

    #[test]
    fn ratfn_derivative_quotient_rule() {
        let q = Rationals;
        // d/dw (1/w) = -1/w^2
        let r = RatFn::new(Poly::one(q), Poly::from_i64(q, &[0, 1]));
        let d = r.derivative();
        assert_eq!(d.num, Poly::from_i64(q, &[-1]));
        assert_eq!(d.den, Poly::from_i64(q, &[0, 0, 1]));
    }

    #[test]
    fn compose_monomial_substitutes() {
        let f = fp();
        let p = Poly::from_i64(f, &[1, 1]); // 1 + x
        let c = p.compose_monomial(&16, 2); // 1 + 16 w^2
        assert_eq!(c, Poly::from_i64(f, &[1, 0, 16]));
    }
}
