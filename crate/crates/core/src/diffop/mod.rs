//! Linear differential operators as noncommutative polynomials in w and a
//! derivation, with arithmetic, change of variable and local analysis.
//!
//! Two derivation bases are supported: theta = w d/dw (the Euler
//! operator, which acts diagonally on monomials) and d/dw. The theta form
//! with the coefficient grid sum a_ij w^j theta^i is the canonical one
//! for recurrence extraction and indicial data.

mod curvature;
mod local;
mod polyroots;
mod sympow;

pub use curvature::{p_curvature, p_curvature_of_rational, CurvatureReport};
pub use local::{Point, 
    classify_singularity, formal_log_solutions, indicial_polynomial, local_exponents,
    ExponentMultiset, LogBlock, LogStructure, SingularityClass,
};
pub use polyroots::{rational_roots_exact, roots_mod_p, factor_squarefree_mod_p};
pub use sympow::symmetric_power_exact;

use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use crate::field::{rational_content, Field, Fp, Rationals};
use crate::poly::{Poly, RatFn};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiffOpError {
    #[error("ContextMismatch: operands live over different arithmetic contexts")]
    ContextMismatch,
    #[error("DivisionDegenerate: leading polynomial identically zero")]
    DivisionDegenerate,
    #[error("ZeroScale: cannot rescale the variable by zero")]
    ZeroScale,
    #[error("IrregularPoint: point is an irregular singularity")]
    IrregularPoint,
    #[error("BadReductionAtP: operator does not reduce well modulo {0}")]
    BadReductionAtP(u64),
    #[error("ZeroOperator: operation undefined for the zero operator")]
    ZeroOperator,
}

/// Derivation basis of an operator.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Basis {
    /// theta = w d/dw
    Theta,
    /// d/dw
    Ddw,
}

/// A linear differential operator with dense polynomial coefficients:
/// `sum coeffs[i](w) * Dw^i` or `sum coeffs[i](w) * theta^i`.
#[derive(Clone, PartialEq, Debug)]
pub struct DiffOperator<F: Field> {
    field: F,
    basis: Basis,
    coeffs: Vec<Poly<F>>,
}

impl<F: Field> DiffOperator<F> {
    /// Builds and normalizes; trailing zero coefficient polynomials are
    /// trimmed and the scalar gauge is made canonical.
    pub fn new(field: F, basis: Basis, mut coeffs: Vec<Poly<F>>) -> Self {
        while coeffs.last().map_or(false, |p| p.is_zero()) {
            coeffs.pop();
        }
        let mut op = DiffOperator { field, basis, coeffs };
        op.normalize_gauge();
        op
    }

    pub fn zero(field: F, basis: Basis) -> Self {
        DiffOperator { field, basis, coeffs: Vec::new() }
    }

    /// Operator from rows of small integers: `rows[i]` is the polynomial
    /// multiplying the i-th derivation power.
    pub fn from_i64_rows(field: F, basis: Basis, rows: &[&[i64]]) -> Self {
        let coeffs = rows.iter().map(|r| Poly::from_i64(field.clone(), r)).collect();
        DiffOperator::new(field, basis, coeffs)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order: highest derivation power (0 for the zero operator).
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Max degree over all coefficient polynomials.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().map(|p| p.degree()).max().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[Poly<F>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Poly<F> {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.field.clone()))
    }

    pub fn leading_poly(&self) -> Poly<F> {
        self.coeff(self.order())
    }

    fn normalize_gauge(&mut self) {
        if self.coeffs.is_empty() {
            return;
        }
        let lc = self.coeffs.last().unwrap().leading();
        if !self.field.is_one(&lc) {
            if let Some(inv) = self.field.inv(&lc) {
                for c in &mut self.coeffs {
                    *c = c.scale(&inv);
                }
            }
        }
    }

    /// The w-major grid of a theta-basis operator: entry j is the
    /// indicial-style polynomial q_j(rho) multiplying w^j.
    pub fn theta_grid(&self) -> Vec<Poly<F>> {
        assert_eq!(self.basis, Basis::Theta, "theta_grid needs theta basis");
        let d = self.degree();
        let mut grid = Vec::with_capacity(d + 1);
        for j in 0..=d {
            let row: Vec<F::Elem> = self.coeffs.iter().map(|c| c.coeff(j)).collect();
            grid.push(Poly::new(self.field.clone(), row));
        }
        grid
    }

    /// Rebuild from a theta w-major grid.
    pub fn from_theta_grid(field: F, grid: &[Poly<F>]) -> Self {
        let order = grid.iter().map(|q| q.degree()).max().unwrap_or(0);
        let mut coeffs = Vec::with_capacity(order + 1);
        for i in 0..=order {
            let row: Vec<F::Elem> = grid.iter().map(|q| q.coeff(i)).collect();
            coeffs.push(Poly::new(field.clone(), row));
        }
        DiffOperator::new(field, Basis::Theta, coeffs)
    }

    /// Conversion between derivation bases.
    ///
    /// theta -> d/dw is exact. d/dw -> theta multiplies on the left by a
    /// power of w (which preserves the solution space) and then strips
    /// common monomial content.
    pub fn convert_basis(&self, target: Basis) -> Self {
        if self.basis == target || self.is_zero() {
            let mut r = self.clone();
            r.basis = target;
            return r;
        }
        match target {
            Basis::Ddw => self.theta_to_ddw(),
            Basis::Theta => self.ddw_to_theta(),
        }
    }

    fn theta_to_ddw(&self) -> Self {
        // theta^i = sum_k S(i,k) w^k D^k with Stirling numbers of the
        // second kind
        let f = &self.field;
        let q = self.order();
        let stirling = stirling2(f, q);
        let mut out = vec![Poly::zero(f.clone()); q + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            for k in 0..=i {
                let s = &stirling[i][k];
                if f.is_zero(s) {
                    continue;
                }
                let term = c.scale(s).shift_up(k);
                out[k] = out[k].add(&term);
            }
        }
        DiffOperator::new(f.clone(), Basis::Ddw, out)
    }

    fn ddw_to_theta(&self) -> Self {
        // w^Q L = sum_i w^(Q-i) p_i(w) theta(theta-1)...(theta-i+1)
        let f = &self.field;
        let q = self.order();
        let mut grid: Vec<Poly<F>> = Vec::new(); // indexed by w power, poly in theta
        let mut falling = Poly::one(f.clone());
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                // falling *= (theta - (i-1))
                let lin = Poly::new(
                    f.clone(),
                    vec![f.from_i64(-(i as i64 - 1)), f.one()],
                );
                falling = falling.mul(&lin);
            }
            if c.is_zero() {
                continue;
            }
            for (deg, coeff) in c.coeffs().iter().enumerate() {
                if f.is_zero(coeff) {
                    continue;
                }
                let j = q - i + deg;
                if grid.len() <= j {
                    grid.resize(j + 1, Poly::zero(f.clone()));
                }
                grid[j] = grid[j].add(&falling.scale(coeff));
            }
        }
        DiffOperator::from_theta_grid(f.clone(), &grid).strip_monomial_content()
    }

    /// Divides out the common polynomial factor of all coefficients
    /// (solution space unchanged; used to compare conversion round trips
    /// and to desingularize products).
    pub fn divide_polynomial_content(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = Poly::zero(self.field.clone());
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            g = if g.is_zero() { c.clone() } else { g.gcd(c) };
            if g.degree() == 0 {
                return self.clone();
            }
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| if c.is_zero() { c.clone() } else { c.divrem(&g).0 })
            .collect();
        DiffOperator::new(self.field.clone(), self.basis, coeffs)
    }

    /// Removes a common w^k factor from all coefficient polynomials.
    pub fn strip_monomial_content(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let v = self.coeffs.iter().filter(|p| !p.is_zero()).map(|p| p.valuation()).min().unwrap();
        if v == 0 {
            return self.clone();
        }
        let coeffs = self.coeffs.iter().map(|p| if p.is_zero() { p.clone() } else { p.shift_down(v) }).collect();
        DiffOperator::new(self.field.clone(), self.basis, coeffs)
    }

    /// Noncommutative product: `multiply(A, B)(S) = A(B(S))`.
    pub fn multiply(&self, rhs: &Self) -> Result<Self, DiffOpError> {
        if self.field != rhs.field {
            return Err(DiffOpError::ContextMismatch);
        }
        if self.is_zero() || rhs.is_zero() {
            return Ok(DiffOperator::zero(self.field.clone(), self.basis));
        }
        match (self.basis, rhs.basis) {
            (Basis::Theta, Basis::Theta) => Ok(self.multiply_theta(rhs)),
            _ => {
                let a = self.convert_basis(Basis::Ddw);
                let b = rhs.convert_basis(Basis::Ddw);
                Ok(a.multiply_ddw(&b))
            }
        }
    }

    fn multiply_theta(&self, rhs: &Self) -> Self {
        // (w^j f(theta)) (w^k g(theta)) = w^(j+k) f(theta + k) g(theta)
        let f = &self.field;
        let ga = self.theta_grid();
        let gb = rhs.theta_grid();
        let mut out: Vec<Poly<F>> =
            vec![Poly::zero(f.clone()); ga.len() + gb.len() - 1];
        for (k, qb) in gb.iter().enumerate() {
            if qb.is_zero() {
                continue;
            }
            let shift = f.from_i64(k as i64);
            for (j, qa) in ga.iter().enumerate() {
                if qa.is_zero() {
                    continue;
                }
                let qa_shifted = qa.shift_argument(&shift);
                out[j + k] = out[j + k].add(&qa_shifted.mul(qb));
            }
        }
        DiffOperator::from_theta_grid(f.clone(), &out)
    }

    fn multiply_ddw(&self, rhs: &Self) -> Self {
        // D^i (b(w) D^j) = sum_t C(i,t) b^(t) D^(i-t+j)
        let f = &self.field;
        let order = self.order() + rhs.order();
        let mut out = vec![Poly::zero(f.clone()); order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let mut bt = b.clone();
                let mut binom = f.one();
                for t in 0..=i {
                    if t > 0 {
                        bt = bt.derivative();
                        if bt.is_zero() {
                            break;
                        }
                        // C(i,t) = C(i,t-1) * (i-t+1)/t
                        binom = f.mul(&binom, &f.from_i64((i - t + 1) as i64));
                        binom = f
                            .div(&binom, &f.from_i64(t as i64))
                            .expect("t below characteristic");
                    }
                    let term = a.mul(&bt).scale(&binom);
                    out[i - t + j] = out[i - t + j].add(&term);
                }
            }
        }
        DiffOperator::new(f.clone(), Basis::Ddw, out)
    }

    /// Right Euclidean division over the fraction field: A = Q*B + R with
    /// ord R < ord B. Quotient and remainder are re-normalized to
    /// primitive polynomial coefficients individually, so the identity
    /// holds up to the cleared contents; a zero remainder is exact.
    pub fn right_divide(&self, rhs: &Self) -> Result<(Self, Self), DiffOpError> {
        if self.field != rhs.field {
            return Err(DiffOpError::ContextMismatch);
        }
        if rhs.is_zero() {
            return Err(DiffOpError::ZeroOperator);
        }
        let a = FracOperator::from_poly_op(&self.convert_basis(Basis::Ddw));
        let b = FracOperator::from_poly_op(&rhs.convert_basis(Basis::Ddw));
        let (q, r) = a.divrem(&b)?;
        Ok((q.clear_denominators(), r.clear_denominators()))
    }

    /// Shift of the independent variable: solutions g(x) = f(x + w_s).
    pub fn translate(&self, w_s: &F::Elem) -> Self {
        let ddw = self.convert_basis(Basis::Ddw);
        let coeffs = ddw
            .coeffs
            .iter()
            .map(|p| p.shift_argument(w_s))
            .collect();
        DiffOperator::new(self.field.clone(), Basis::Ddw, coeffs)
    }

    /// Move the point at infinity to the origin: x = 1/w. An exponent c
    /// at 0 maps to -c at infinity.
    pub fn invert_at_infinity(&self) -> Self {
        let theta = self.convert_basis(Basis::Theta);
        let grid = theta.theta_grid();
        let f = &self.field;
        let d = grid.len() - 1;
        let minus_one = f.from_i64(-1);
        let mut out = Vec::with_capacity(d + 1);
        for j in 0..=d {
            // q~_j(theta) = q_(d-j)(-theta)
            let src = &grid[d - j];
            let neg: Vec<F::Elem> = src
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if i % 2 == 1 {
                        f.mul(c, &minus_one)
                    } else {
                        c.clone()
                    }
                })
                .collect();
            out.push(Poly::new(f.clone(), neg));
        }
        DiffOperator::from_theta_grid(f.clone(), &out)
    }

    /// Rescale the variable: solutions g(v) = f(c v).
    pub fn scale_variable(&self, c: &F::Elem) -> Result<Self, DiffOpError> {
        if self.field.is_zero(c) {
            return Err(DiffOpError::ZeroScale);
        }
        match self.basis {
            Basis::Theta => {
                let grid = self.theta_grid();
                let f = &self.field;
                let mut factor = f.one();
                let out: Vec<Poly<F>> = grid
                    .iter()
                    .map(|q| {
                        let r = q.scale(&factor);
                        factor = f.mul(&factor, c);
                        r
                    })
                    .collect();
                Ok(DiffOperator::from_theta_grid(f.clone(), &out))
            }
            Basis::Ddw => {
                // p_i(w) D_w^i -> p_i(c v) c^(-i) D_v^i
                let f = &self.field;
                let c_inv = f.inv(c).unwrap();
                let mut ci = f.one();
                let coeffs: Vec<Poly<F>> = self
                    .coeffs
                    .iter()
                    .map(|p| {
                        let r = p.scale_argument(c).scale(&ci);
                        ci = f.mul(&ci, &c_inv);
                        r
                    })
                    .collect();
                Ok(DiffOperator::new(f.clone(), Basis::Ddw, coeffs))
            }
        }
    }

    /// Substitute x = c * w^m into an operator in x; theta_x = theta_w/m.
    pub fn substitute_monomial(&self, c: &F::Elem, m: usize) -> Self {
        assert!(m >= 1);
        let theta = self.convert_basis(Basis::Theta);
        let grid = theta.theta_grid();
        let f = &self.field;
        let inv_m = f
            .inv(&f.from_i64(m as i64))
            .expect("m invertible in the context");
        let mut out = vec![Poly::zero(f.clone()); (grid.len() - 1) * m + 1];
        let mut factor = f.one();
        for (j, q) in grid.iter().enumerate() {
            if !q.is_zero() {
                out[j * m] = q.scale_argument(&inv_m).scale(&factor);
            }
            factor = f.mul(&factor, c);
        }
        DiffOperator::from_theta_grid(f.clone(), &out)
    }

    /// Gauge twist by a log-derivative r = mu'/mu: replaces D by D - r,
    /// so solutions are multiplied by mu. Denominators are cleared at the
    /// end.
    pub fn twist_by_log_derivative(&self, r: &RatFn<F>) -> Self {
        let ddw = self.convert_basis(Basis::Ddw);
        let f = self.field.clone();
        let mut acc = FracOperator { field: f.clone(), coeffs: Vec::new() };
        // Horner from the top: acc = acc * (D - r) + p_i
        for i in (0..=ddw.order()).rev() {
            acc = acc.mul_d_minus(r);
            let p = ddw.coeff(i);
            if !p.is_zero() {
                if acc.coeffs.is_empty() {
                    acc.coeffs.push(RatFn::from_poly(p));
                } else {
                    acc.coeffs[0] = acc.coeffs[0].add(&RatFn::from_poly(p));
                }
            }
        }
        acc.clear_denominators()
    }
}

impl DiffOperator<Rationals> {
    /// Canonical integer form: clear denominators, divide by integer
    /// content, make the leading coefficient of the leading polynomial
    /// positive.
    pub fn normalize_primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let q = Rationals;
        let mut all: Vec<BigRational> = Vec::new();
        for c in &self.coeffs {
            all.extend(c.coeffs().iter().cloned());
        }
        let content = rational_content(&all);
        let mut scaled: Vec<Poly<Rationals>> = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c.coeffs().iter().map(|x| x / &content).collect();
                Poly::new(q, v)
            })
            .collect();
        if scaled.last().unwrap().leading().is_negative() {
            for c in &mut scaled {
                *c = c.neg();
            }
        }
        DiffOperator { field: q, basis: self.basis, coeffs: scaled }
    }

    /// Reduction modulo p; fails when the leading polynomial degenerates
    /// or a denominator vanishes mod p.
    pub fn reduce_mod(&self, fp: Fp) -> Result<DiffOperator<Fp>, DiffOpError> {
        let p = fp.modulus();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let mut v = Vec::with_capacity(c.coeffs().len());
            for x in c.coeffs() {
                let e = fp
                    .from_rational(x)
                    .ok_or(DiffOpError::BadReductionAtP(p))?;
                v.push(e);
            }
            coeffs.push(Poly::new(fp, v));
        }
        let op = DiffOperator::new(fp, self.basis, coeffs);
        if op.order() != self.order() {
            return Err(DiffOpError::BadReductionAtP(p));
        }
        Ok(op)
    }
}

/// An operator with rational-function coefficients over the fraction
/// field; used for exact division, twists and equivalence checks.
#[derive(Clone, PartialEq, Debug)]
pub struct FracOperator<F: Field> {
    pub field: F,
    /// coeffs[i] multiplies D^i (always d/dw basis)
    pub coeffs: Vec<RatFn<F>>,
}

impl<F: Field> FracOperator<F> {
    pub fn from_poly_op(op: &DiffOperator<F>) -> Self {
        let op = op.convert_basis(Basis::Ddw);
        FracOperator {
            field: op.field.clone(),
            coeffs: op.coeffs.iter().map(|p| RatFn::from_poly(p.clone())).collect(),
        }
    }

    pub fn zero(field: F) -> Self {
        FracOperator { field, coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn order(&self) -> usize {
        let mut d = 0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                d = i;
            }
        }
        d
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = RatFn::zero(self.field.clone());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).unwrap_or(&zero);
            let b = rhs.coeffs.get(i).unwrap_or(&zero);
            v.push(a.sub(b));
        }
        let mut r = FracOperator { field: self.field.clone(), coeffs: v };
        r.trim();
        r
    }

    /// Product of operators with rational function coefficients.
    pub fn mul(&self, rhs: &Self) -> Self {
        let f = &self.field;
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return FracOperator::zero(f.clone());
        }
        let order = (self.coeffs.len() - 1) + (rhs.coeffs.len() - 1);
        let mut out = vec![RatFn::zero(f.clone()); order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let mut bt = b.clone();
                let mut binom = f.one();
                for t in 0..=i {
                    if t > 0 {
                        bt = bt.derivative();
                        binom = f.mul(&binom, &f.from_i64((i - t + 1) as i64));
                        binom = f.div(&binom, &f.from_i64(t as i64)).unwrap();
                        if bt.is_zero() {
                            continue;
                        }
                    }
                    let term = a.mul(&bt).scale(&binom);
                    out[i - t + j] = out[i - t + j].add(&term);
                }
            }
        }
        let mut r = FracOperator { field: f.clone(), coeffs: out };
        r.trim();
        r
    }

    /// Multiply on the right by (D - r): self * D - self * r.
    fn mul_d_minus(&self, r: &RatFn<F>) -> Self {
        let f = self.field.clone();
        let d_op = FracOperator {
            field: f.clone(),
            coeffs: vec![r.neg(), RatFn::from_poly(Poly::one(f.clone()))],
        };
        if self.coeffs.is_empty() {
            return d_op;
        }
        self.mul(&d_op)
    }

    /// Right division: self = q * rhs + r with ord r < ord rhs.
    pub fn divrem(&self, rhs: &Self) -> Result<(Self, Self), DiffOpError> {
        let f = self.field.clone();
        if rhs.is_zero() {
            return Err(DiffOpError::ZeroOperator);
        }
        let ord_b = rhs.order();
        let lead_b = rhs.coeffs[ord_b].clone();
        if lead_b.is_zero() {
            return Err(DiffOpError::DivisionDegenerate);
        }
        let mut rem = self.clone();
        rem.trim();
        let mut q = FracOperator::zero(f.clone());
        while !rem.is_zero() && rem.order() >= ord_b {
            let ord_r = rem.order();
            let c = rem.coeffs[ord_r].div(&lead_b);
            // term = c * D^(ord_r - ord_b)
            let k = ord_r - ord_b;
            let mut term_coeffs = vec![RatFn::zero(f.clone()); k + 1];
            term_coeffs[k] = c;
            let term = FracOperator { field: f.clone(), coeffs: term_coeffs };
            if q.coeffs.len() < k + 1 {
                q.coeffs.resize(k + 1, RatFn::zero(f.clone()));
            }
            q.coeffs[k] = q.coeffs[k].add(&term.coeffs[k]);
            rem = rem.sub(&term.mul(rhs));
            // guard: the leading term must have cancelled
            if rem.coeffs.len() > ord_r && !rem.coeffs[ord_r].is_zero() {
                return Err(DiffOpError::DivisionDegenerate);
            }
            rem.coeffs.truncate(ord_r);
            rem.trim();
        }
        q.trim();
        Ok((q, rem))
    }

    /// Clears denominators and normalizes to a primitive polynomial
    /// operator (zero maps to zero).
    pub fn clear_denominators(&self) -> DiffOperator<F> {
        let f = self.field.clone();
        if self.is_zero() {
            return DiffOperator::zero(f, Basis::Ddw);
        }
        let mut lcm = Poly::one(f.clone());
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            let g = lcm.gcd(&c.den);
            lcm = lcm.mul(&c.den.divrem(&g).0);
        }
        let coeffs: Vec<Poly<F>> = self
            .coeffs
            .iter()
            .map(|c| {
                if c.is_zero() {
                    Poly::zero(f.clone())
                } else {
                    c.num.mul(&lcm.divrem(&c.den).0)
                }
            })
            .collect();
        DiffOperator::new(f, Basis::Ddw, coeffs)
    }
}

/// Stirling numbers of the second kind up to n, as field elements.
fn stirling2<F: Field>(f: &F, n: usize) -> Vec<Vec<F::Elem>> {
    let mut s = vec![vec![f.zero(); n + 1]; n + 1];
    s[0][0] = f.one();
    for i in 1..=n {
        for k in 1..=i {
            // S(i,k) = k S(i-1,k) + S(i-1,k-1)
            let t = f.mul(&f.from_i64(k as i64), &s[i - 1][k]);
            s[i][k] = f.add(&t, &s[i - 1][k - 1]);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    fn fp() -> Fp {
        Fp::new(32749).unwrap()
    }

    /// theta in ddw basis is w D.
    #[test]
    fn convert_theta_to_ddw() {
        let f = fp();
        let theta = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[0], &[1]]);
        let ddw = theta.convert_basis(Basis::Ddw);
        assert_eq!(ddw, DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0], &[0, 1]]));
    }

    /// theta^2 = w^2 D^2 + w D.
    #[test]
    fn convert_theta_squared() {
        let f = fp();
        let t2 = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[0], &[0], &[1]]);
        let ddw = t2.convert_basis(Basis::Ddw);
        assert_eq!(
            ddw,
            DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0], &[0, 1], &[0, 0, 1]])
        );
    }

    #[test]
    fn convert_round_trip_constant_coeff() {
        let f = fp();
        // D^2 - 1: round trip is the identity up to polynomial content
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0], &[1]]);
        let back = l
            .convert_basis(Basis::Theta)
            .convert_basis(Basis::Ddw)
            .divide_polynomial_content();
        assert_eq!(back, l);
        // order-0 operator unchanged
        let c = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[5]]);
        assert_eq!(c.convert_basis(Basis::Theta).order(), 0);
    }

    /// Leibniz: D w = w D + 1.
    #[test]
    fn multiply_leibniz() {
        let f = fp();
        let d = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0], &[1]]);
        let w = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0, 1]]);
        let p = d.multiply(&w).unwrap();
        assert_eq!(p, DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[1], &[0, 1]]));
    }

    #[test]
    fn multiply_constant_coefficient_factors() {
        let f = fp();
        let a = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[1], &[1]]); // D + 1
        let b = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[1]]); // D - 1
        let p = a.multiply(&b).unwrap();
        assert_eq!(p, DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0], &[1]]));
    }

    /// (D + 1/w)(D - 1/w) = D^2 over the fraction field.
    #[test]
    fn multiply_fraction_level() {
        let q = Rationals;
        let w = Poly::from_i64(q, &[0, 1]);
        let inv_w = RatFn::new(Poly::one(q), w);
        let one = RatFn::from_poly(Poly::one(q));
        let a = FracOperator { field: q, coeffs: vec![inv_w.clone(), one.clone()] };
        let b = FracOperator { field: q, coeffs: vec![inv_w.neg(), one] };
        let p = a.mul(&b);
        let cleared = p.clear_denominators();
        assert_eq!(
            cleared,
            DiffOperator::from_i64_rows(q, Basis::Ddw, &[&[0], &[0], &[1]])
        );
    }

    #[test]
    fn right_divide_constant_coeff() {
        let f = fp();
        let d2m1 = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0], &[1]]);
        let dm1 = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[1]]);
        let (q, r) = d2m1.right_divide(&dm1).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[1], &[1]]));

        // (D^2, D+1) -> (D-1, 1)
        let d2 = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0], &[0], &[1]]);
        let dp1 = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[1], &[1]]);
        let (q, r) = d2.right_divide(&dp1).unwrap();
        assert_eq!(q, DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[1]]));
        assert_eq!(r, DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[1]]));
    }

    #[test]
    fn divide_after_multiply_round_trip() {
        let f = fp();
        let a = DiffOperator::from_i64_rows(
            f,
            Basis::Ddw,
            &[&[3, 1], &[0, 2, 1], &[1, 0, 0, 4]],
        );
        let b = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[2, 0, 5], &[1, 7]]);
        let p = a.multiply(&b).unwrap();
        let (q, r) = p.right_divide(&b).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, a);
    }

    #[test]
    fn translate_examples() {
        let f = fp();
        // D - 1 is shift invariant
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[1]]);
        assert_eq!(l.translate(&5), l);
        // w D - 1 at w = x+1 -> (x+1) D - 1
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0, 1]]);
        assert_eq!(
            l.translate(&1),
            DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[1, 1]])
        );
    }

    #[test]
    fn invert_at_infinity_euler() {
        let f = fp();
        // theta - c -> -theta - c, i.e. exponent c maps to -c
        let c = 7i64;
        let l = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[-c], &[1]]);
        let inv = l.invert_at_infinity();
        let expect = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[c], &[1]]);
        assert_eq!(inv, expect); // gauge-normalized form of -theta - c
    }

    #[test]
    fn scale_variable_examples() {
        let f = fp();
        // w(1-4w) D - 1 at w = v/2 -> v(1-2v) D - 1
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0, 1, -4]]);
        let half = f.0.inv(2).unwrap();
        let s = l.scale_variable(&half).unwrap();
        assert_eq!(
            s,
            DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0, 1, -2]])
        );
        // identity and round trip
        assert_eq!(l.scale_variable(&1).unwrap(), l);
        let back = s.scale_variable(&2).unwrap();
        assert_eq!(back, l);
        assert_eq!(l.scale_variable(&0), Err(DiffOpError::ZeroScale));
    }

    #[test]
    fn multiply_is_associative() {
        let f = fp();
        let a = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[1, 2], &[3]]);
        let b = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0, 1], &[1, 1]]);
        let c = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[5], &[0, 0, 2]]);
        let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
    }
}
