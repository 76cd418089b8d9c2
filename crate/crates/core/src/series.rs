//! Truncated power series over a prime field or the exact rationals, with
//! generation from an ODE recurrence and operator application.
//!
//! Coefficients below the valuation are exactly zero; coefficients past
//! the stored window are unknown, never padded. Operator application
//! shrinks the reliable window accordingly.

use thiserror::Error;

use crate::diffop::{Basis, DiffOperator};
use crate::field::{Field, Fp, Rationals};
use crate::poly::Poly;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("RecurrenceSingularIndex: leading recurrence coefficient vanishes at index {0} and no seed value is supplied")]
    RecurrenceSingularIndex(usize),
    #[error("InconsistentSeed: seed value at index {0} contradicts the recurrence")]
    InconsistentSeed(usize),
    #[error("ContextMismatch: series live over different arithmetic contexts")]
    ContextMismatch,
    #[error("EmptySeed")]
    EmptySeed,
}

/// A truncated power series: `coeffs[0]` multiplies w^valuation.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncSeries<F: Field> {
    pub field: F,
    valuation: usize,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> TruncSeries<F> {
    pub fn new(field: F, valuation: usize, coeffs: Vec<F::Elem>) -> Self {
        TruncSeries { field, valuation, coeffs }
    }

    /// The zero series known on n coefficients starting at w^0.
    pub fn zero(field: F, n: usize) -> Self {
        let coeffs = vec![field.zero(); n];
        TruncSeries { field, valuation: 0, coeffs }
    }

    pub fn from_i64(field: F, valuation: usize, coeffs: &[i64]) -> Self {
        let v = coeffs.iter().map(|&c| field.from_i64(c)).collect();
        TruncSeries { field, valuation, coeffs: v }
    }

    /// A polynomial as an exactly-known series window of length n.
    pub fn from_poly(p: &Poly<F>, n: usize) -> Self {
        let f = p.field.clone();
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(p.coeff(i));
        }
        TruncSeries { field: f, valuation: 0, coeffs }
    }

    pub fn valuation(&self) -> usize {
        self.valuation
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// One past the last reliable absolute index.
    pub fn end(&self) -> usize {
        self.valuation + self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    /// Coefficient of w^k; zero below the valuation, panics past the
    /// window.
    pub fn coeff(&self, k: usize) -> F::Elem {
        if k < self.valuation {
            self.field.zero()
        } else {
            assert!(k < self.end(), "coefficient {k} past reliable window");
            self.coeffs[k - self.valuation].clone()
        }
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero_on_window(&self) -> bool {
        self.coeffs.iter().all(|c| self.field.is_zero(c))
    }

    /// First absolute index with a nonzero coefficient.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|c| !self.field.is_zero(c))
            .map(|i| i + self.valuation)
    }

    /// Restrict the window to at most n coefficients.
    pub fn truncate(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(n);
        s
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|x| self.field.mul(x, c)).collect();
        TruncSeries { field: self.field.clone(), valuation: self.valuation, coeffs }
    }

    /// Pointwise product on the common reliable window.
    pub fn mul(&self, rhs: &Self) -> Self {
        let f = &self.field;
        let val = self.valuation + rhs.valuation;
        let end = (self.end() + rhs.valuation).min(rhs.end() + self.valuation);
        let n = end.saturating_sub(val);
        let mut coeffs = vec![f.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                coeffs[i + j] = f.add(&coeffs[i + j], &f.mul(a, b));
            }
        }
        TruncSeries { field: f.clone(), valuation: val, coeffs }
    }

    /// Reciprocal 1/S to n terms; the lowest coefficient must be a unit
    /// and the valuation zero.
    pub fn invert(&self, n: usize) -> Option<Self> {
        if self.valuation != 0 || self.is_empty() {
            return None;
        }
        let f = &self.field;
        let a0 = self.coeffs[0].clone();
        let inv0 = f.inv(&a0)?;
        let m = n.min(self.len());
        let mut out = vec![f.zero(); m];
        out[0] = inv0.clone();
        for k in 1..m {
            let mut acc = f.zero();
            for j in 1..=k {
                let a = &self.coeffs[j];
                if f.is_zero(a) {
                    continue;
                }
                acc = f.add(&acc, &f.mul(a, &out[k - j]));
            }
            out[k] = f.neg(&f.mul(&acc, &inv0));
        }
        Some(TruncSeries { field: f.clone(), valuation: 0, coeffs: out })
    }
}

impl TruncSeries<Rationals> {
    /// Reduce an exact rational series modulo p; `None` if a denominator
    /// vanishes mod p.
    pub fn reduce_mod(&self, fp: Fp) -> Option<TruncSeries<Fp>> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(fp.from_rational(c)?);
        }
        Some(TruncSeries { field: fp, valuation: self.valuation, coeffs })
    }
}

/// A series with free coefficients: total = base + sum value_i *
/// direction_i, one direction per undetermined higher-exponent
/// coefficient.
#[derive(Clone, Debug)]
pub struct ParametricSeries<F: Field> {
    pub base: TruncSeries<F>,
    /// (index of the free coefficient, derivative of the series with
    /// respect to it)
    pub directions: Vec<(usize, TruncSeries<F>)>,
}

impl<F: Field> ParametricSeries<F> {
    pub fn instantiate(&self, values: &[F::Elem]) -> TruncSeries<F> {
        assert_eq!(values.len(), self.directions.len());
        let mut out = self.base.clone();
        let f = out.field.clone();
        for ((_, dir), v) in self.directions.iter().zip(values) {
            if f.is_zero(v) {
                continue;
            }
            out = linear_combine(&[&out, dir], &[f.one(), v.clone()]).expect("same context");
        }
        out
    }
}

/// Generates n coefficients of the unique solution of `L(S) = 0`
/// extending the seed; seed entries sit at indices where the leading
/// recurrence coefficient vanishes (the analytic local exponents).
pub fn series_from_ode<F: Field>(
    op: &DiffOperator<F>,
    seed: &[(usize, F::Elem)],
    n: usize,
) -> Result<TruncSeries<F>, SeriesError> {
    if seed.is_empty() {
        return Err(SeriesError::EmptySeed);
    }
    let f = op.field().clone();
    let theta = op.convert_basis(Basis::Theta).strip_monomial_content();
    let grid = theta.theta_grid();
    let val = seed.iter().map(|&(k, _)| k).min().unwrap();
    let end = val + n;
    let mut coeffs: Vec<F::Elem> = Vec::with_capacity(n);
    for k in val..end {
        // recurrence: q_0(k) c_k + sum_{j>=1} q_j(k-j) c_{k-j} = 0
        let mut acc = f.zero();
        for (j, qj) in grid.iter().enumerate().skip(1) {
            if j > k || qj.is_zero() {
                break_if_past(j, k);
                continue;
            }
            let src = k - j;
            if src < val {
                continue;
            }
            if src - val >= coeffs.len() {
                continue;
            }
            let c = &coeffs[src - val];
            if f.is_zero(c) {
                continue;
            }
            let q = qj.eval(&f.from_i64(src as i64));
            acc = f.add(&acc, &f.mul(&q, c));
        }
        let q0 = grid[0].eval(&f.from_i64(k as i64));
        let seeded = seed.iter().find(|&&(i, _)| i == k).map(|(_, v)| v.clone());
        let ck = if f.is_zero(&q0) {
            match seeded {
                Some(v) => {
                    if !f.is_zero(&acc) {
                        return Err(SeriesError::InconsistentSeed(k));
                    }
                    v
                }
                None => return Err(SeriesError::RecurrenceSingularIndex(k)),
            }
        } else {
            let computed = f.neg(&f.div(&acc, &q0).unwrap());
            if let Some(v) = seeded {
                if v != computed {
                    return Err(SeriesError::InconsistentSeed(k));
                }
            }
            computed
        };
        coeffs.push(ck);
    }
    Ok(TruncSeries::new(f, val, coeffs))
}

#[inline]
fn break_if_past(_j: usize, _k: usize) {}

/// Applies an operator to a series; the reliable output window is exactly
/// where every contributing input coefficient is known.
pub fn apply_operator<F: Field>(op: &DiffOperator<F>, s: &TruncSeries<F>) -> TruncSeries<F> {
    let f = op.field().clone();
    if op.is_zero() || s.is_empty() {
        return TruncSeries::new(f, s.valuation(), Vec::new());
    }
    match op.basis() {
        Basis::Theta => {
            let grid = op.theta_grid();
            let j_min = grid.iter().position(|q| !q.is_zero()).unwrap_or(0);
            let val_out = s.valuation() + j_min;
            let end_out = s.end() + j_min;
            let mut coeffs = Vec::with_capacity(end_out - val_out);
            for k in val_out..end_out {
                let mut acc = f.zero();
                for (j, qj) in grid.iter().enumerate() {
                    if qj.is_zero() || j > k {
                        continue;
                    }
                    let src = k - j;
                    if src < s.valuation() || src >= s.end() {
                        continue;
                    }
                    let c = s.coeff(src);
                    if f.is_zero(&c) {
                        continue;
                    }
                    acc = f.add(&acc, &f.mul(&qj.eval(&f.from_i64(src as i64)), &c));
                }
                coeffs.push(acc);
            }
            TruncSeries::new(f, val_out, coeffs)
        }
        Basis::Ddw => {
            // monomial a w^m D^i maps c_k w^k to ff(k,i) a c_k w^(k-i+m)
            let mut s_min: i64 = i64::MAX;
            for (i, p) in op.coeffs().iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                s_min = s_min.min(p.valuation() as i64 - i as i64);
            }
            let val_out = (s.valuation() as i64 + s_min).max(0) as usize;
            let end_out_i = s.end() as i64 + s_min;
            if end_out_i <= val_out as i64 {
                return TruncSeries::new(f, val_out, Vec::new());
            }
            let end_out = end_out_i as usize;
            let mut coeffs = vec![f.zero(); end_out - val_out];
            for (i, p) in op.coeffs().iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                for (m, a) in p.coeffs().iter().enumerate() {
                    if f.is_zero(a) {
                        continue;
                    }
                    for k in s.valuation()..s.end() {
                        let t = k as i64 - i as i64 + m as i64;
                        if t < val_out as i64 || t >= end_out as i64 {
                            continue;
                        }
                        let c = s.coeff(k);
                        if f.is_zero(&c) {
                            continue;
                        }
                        // falling factorial k (k-1) ... (k-i+1)
                        let mut ff = f.one();
                        for d in 0..i {
                            ff = f.mul(&ff, &f.from_i64(k as i64 - d as i64));
                        }
                        if f.is_zero(&ff) {
                            continue;
                        }
                        let idx = t as usize - val_out;
                        let term = f.mul(&f.mul(a, &ff), &c);
                        coeffs[idx] = f.add(&coeffs[idx], &term);
                    }
                }
            }
            TruncSeries::new(f, val_out, coeffs)
        }
    }
}

/// Pointwise combination on the overlap of reliable windows.
pub fn linear_combine<F: Field>(
    series: &[&TruncSeries<F>],
    coefficients: &[F::Elem],
) -> Result<TruncSeries<F>, SeriesError> {
    assert_eq!(series.len(), coefficients.len());
    assert!(!series.is_empty());
    let f = series[0].field.clone();
    for s in series {
        if s.field != f {
            return Err(SeriesError::ContextMismatch);
        }
    }
    let val = series.iter().map(|s| s.valuation()).min().unwrap();
    let end = series.iter().map(|s| s.end()).min().unwrap();
    if end <= val {
        return Ok(TruncSeries::new(f, val, Vec::new()));
    }
    let mut coeffs = vec![f.zero(); end - val];
    for (s, c) in series.iter().zip(coefficients) {
        if f.is_zero(c) {
            continue;
        }
        for k in s.valuation()..end.min(s.end()) {
            let idx = k - val;
            coeffs[idx] = f.add(&coeffs[idx], &f.mul(&s.coeff(k), c));
        }
    }
    Ok(TruncSeries::new(f, val, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    fn fp() -> Fp {
        Fp::new(32749).unwrap()
    }

    /// w(1-4w) D - 1 with seed a_1 = 1 is the geometric series of
    /// w/(1-4w).
    #[test]
    fn geometric_series_from_ode() {
        let f = fp();
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0, 1, -4]]);
        let s = series_from_ode(&l, &[(1, 1)], 4).unwrap();
        assert_eq!(s, TruncSeries::from_i64(f, 1, &[1, 4, 16, 64]));
    }

    #[test]
    fn constant_series_from_ode() {
        let f = fp();
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0], &[1]]);
        let s = series_from_ode(&l, &[(0, 1)], 4).unwrap();
        assert_eq!(s, TruncSeries::from_i64(f, 0, &[1, 0, 0, 0]));
    }

    #[test]
    fn missing_seed_is_singular_index() {
        let f = fp();
        // theta (theta - 3) has singular indices 0 and 3; seeding only
        // index 0 leaves the collision at 3 unresolved
        let a = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[0], &[1]]);
        let b = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[-3], &[1]]);
        let l = a.multiply(&b).unwrap();
        let r = series_from_ode(&l, &[(0, 1)], 6);
        assert_eq!(r, Err(SeriesError::RecurrenceSingularIndex(3)));
    }

    #[test]
    fn apply_operator_annihilates_its_series() {
        let f = fp();
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0, 1, -4]]);
        let s = series_from_ode(&l, &[(1, 1)], 30).unwrap();
        let img = apply_operator(&l, &s);
        assert!(img.is_zero_on_window());
        assert!(img.len() >= 29);
    }

    #[test]
    fn apply_theta_is_diagonal() {
        let f = fp();
        let theta = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[0], &[1]]);
        let w3 = TruncSeries::from_i64(f, 3, &[1]);
        let img = apply_operator(&theta, &w3);
        assert_eq!(img, TruncSeries::from_i64(f, 3, &[3]));
    }

    #[test]
    fn apply_ddw_to_constant() {
        let f = fp();
        let d = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0], &[1]]);
        let one = TruncSeries::from_i64(f, 0, &[1, 0, 0]);
        let img = apply_operator(&d, &one);
        assert!(img.is_zero_on_window());
    }

    #[test]
    fn apply_respects_products() {
        let f = fp();
        let a = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[2, 1], &[0, 3]]);
        let b = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[1], &[1, 1]]);
        let ab = a.multiply(&b).unwrap();
        let s = TruncSeries::from_i64(f, 0, &[1, 5, 2, 7, 3, 1, 4, 2, 9, 6]);
        let lhs = apply_operator(&ab, &s);
        let rhs = apply_operator(&a, &apply_operator(&b, &s));
        for k in rhs.valuation().max(lhs.valuation())..rhs.end().min(lhs.end()) {
            assert_eq!(lhs.coeff(k), rhs.coeff(k), "differ at {k}");
        }
    }

    #[test]
    fn apply_is_linear() {
        let f = fp();
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[1, 2], &[0, 1], &[3]]);
        let s = TruncSeries::from_i64(f, 0, &[1, 2, 3, 4, 5, 6]);
        let t = TruncSeries::from_i64(f, 1, &[7, 1, 2, 5, 8]);
        let a = f.from_i64(11);
        let b = f.from_i64(-3);
        let comb = linear_combine(&[&s, &t], &[a, b]).unwrap();
        let lhs = apply_operator(&l, &comb);
        let la = apply_operator(&l, &s);
        let lb = apply_operator(&l, &t);
        let rhs = linear_combine(&[&la, &lb], &[a, b]).unwrap();
        for k in lhs.valuation().max(rhs.valuation())..lhs.end().min(rhs.end()) {
            assert_eq!(lhs.coeff(k), rhs.coeff(k));
        }
    }

    #[test]
    fn combine_identities() {
        let f = fp();
        let s = TruncSeries::from_i64(f, 0, &[1, 2, 3]);
        let t = TruncSeries::from_i64(f, 0, &[5, 1, 4]);
        let zero_t = linear_combine(&[&s, &t], &[1, 0]).unwrap();
        assert_eq!(zero_t.coeffs(), s.coeffs());
        let cancel = linear_combine(&[&s, &s], &[1, 32748]).unwrap();
        assert!(cancel.is_zero_on_window());
    }

    #[test]
    fn modular_rational_consistency() {
        let q = Rationals;
        let f = fp();
        let lq = DiffOperator::from_i64_rows(q, Basis::Ddw, &[&[-1], &[0, 1, -4]]);
        let lp = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0, 1, -4]]);
        let sq = series_from_ode(&lq, &[(1, q.one())], 20).unwrap();
        let sp = series_from_ode(&lp, &[(1, 1)], 20).unwrap();
        assert_eq!(sq.reduce_mod(f).unwrap(), sp);
    }
}
