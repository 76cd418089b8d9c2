//! Local analysis at regular singular points: indicial polynomials, local
//! exponents, the logarithmic solution structure, and singularity
//! classification.
//!
//! Points are moved to the origin (translation, or inversion for
//! infinity), the operator is put in theta form and the indicial data is
//! read off the lowest w-coefficient. The log structure follows the
//! term-by-term solving recipe: within an equation, solve for the unknown
//! with the lowest log power and the highest w index.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::polyroots::{rational_roots_exact, roots_mod_p};
use super::{Basis, DiffOpError, DiffOperator};
use crate::field::{Field, Fp, Rationals};
use crate::modarith::rational_reconstruct;
use crate::poly::Poly;

/// A point of local analysis.
#[derive(Clone, PartialEq, Debug)]
pub enum Point<F: Field> {
    Finite(F::Elem),
    Infinity,
}

impl<F: Field> Point<F> {
    pub fn origin(f: &F) -> Self {
        Point::Finite(f.zero())
    }
}

/// Local exponents: rational roots of the indicial polynomial with
/// multiplicities, plus irreducible indicial factors of degree > 1 (the
/// spurious exponents of non-minimal operators).
#[derive(Clone, PartialEq, Debug)]
pub struct ExponentMultiset {
    pub rational: Vec<(BigRational, usize)>,
    /// (degree of irreducible factor, multiplicity)
    pub nonlinear: Vec<(usize, usize)>,
    pub order: usize,
}

impl ExponentMultiset {
    /// Total root count including the degrees of unresolved factors.
    pub fn total_count(&self) -> usize {
        let r: usize = self.rational.iter().map(|&(_, m)| m).sum();
        let n: usize = self.nonlinear.iter().map(|&(d, m)| d * m).sum();
        r + n
    }

    /// Integer exponents, repeated per multiplicity, ascending.
    pub fn integer_exponents(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for (e, m) in &self.rational {
            if e.is_integer() {
                if let Some(v) = e.to_integer().to_i64() {
                    for _ in 0..*m {
                        out.push(v);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn rational_sorted(&self) -> Vec<(BigRational, usize)> {
        self.rational.clone()
    }
}

/// One ladder of log solutions: the head solution has the maximal log
/// power; each lower power is also attained with the same leading series.
#[derive(Clone, PartialEq, Debug)]
pub struct LogBlock {
    /// Starting exponent of the ladder head's top series.
    pub leading_exponent: BigRational,
    pub max_log_power: usize,
    /// Number of independent solutions in the ladder.
    pub ladder_size: usize,
    /// Starting exponents of the series multiplying log^t, from t =
    /// max_log_power down to t = 0.
    pub attachments: Vec<BigRational>,
}

/// Full local solution structure at a regular singular point.
#[derive(Clone, PartialEq, Debug)]
pub struct LogStructure {
    pub blocks: Vec<LogBlock>,
    /// False when irreducible indicial factors prevented a complete basis.
    pub complete: bool,
    pub order: usize,
}

impl LogStructure {
    pub fn solution_count(&self) -> usize {
        self.blocks.iter().map(|b| b.ladder_size).sum()
    }

    /// The factor-order multiset suggested by the ladder sizes.
    pub fn scheme(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.blocks.iter().map(|b| b.ladder_size).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SingularityClass {
    Ordinary,
    Apparent,
    TrueSingular,
}

/// Extraction of exponent data from an indicial polynomial; field
/// specific.
pub trait ExponentField: Field {
    fn exponents_of(poly: &Poly<Self>, order: usize) -> ExponentMultiset;
    /// Field image of a rational exponent (used to shift theta).
    fn exponent_elem(&self, e: &BigRational) -> Option<Self::Elem>;
}

impl ExponentField for Fp {
    fn exponents_of(poly: &Poly<Self>, order: usize) -> ExponentMultiset {
        let p = poly.field.modulus();
        let (roots, nonlinear) = roots_mod_p(poly);
        let mut rational: Vec<(BigRational, usize)> = Vec::new();
        for (r, m) in roots {
            let e = match rational_reconstruct(&BigUint::from(r), &BigUint::from(p)) {
                Ok(rat) => rat.to_big_rational(),
                Err(_) => BigRational::from_integer(poly.field.0.lift_signed(r).into()),
            };
            rational.push((e, m));
        }
        rational.sort_by(|a, b| a.0.cmp(&b.0));
        ExponentMultiset {
            rational,
            nonlinear: nonlinear.iter().map(|(g, m)| (g.degree(), *m)).collect(),
            order,
        }
    }

    fn exponent_elem(&self, e: &BigRational) -> Option<u64> {
        self.from_rational(e)
    }
}

impl ExponentField for Rationals {
    fn exponents_of(poly: &Poly<Self>, order: usize) -> ExponentMultiset {
        let (roots, rest) = rational_roots_exact(poly);
        let nonlinear = if rest.degree() >= 1 {
            vec![(rest.degree(), 1)]
        } else {
            Vec::new()
        };
        ExponentMultiset { rational: roots, nonlinear, order }
    }

    fn exponent_elem(&self, e: &BigRational) -> Option<BigRational> {
        Some(e.clone())
    }
}

/// Moves the point of interest to the origin; exact for finite points,
/// solution-space preserving for infinity.
fn localize<F: Field>(op: &DiffOperator<F>, point: &Point<F>) -> DiffOperator<F> {
    match point {
        Point::Finite(c) => {
            if op.field().is_zero(c) {
                op.clone()
            } else {
                op.translate(c)
            }
        }
        Point::Infinity => op.invert_at_infinity(),
    }
}

/// The theta-grid of the localized operator with monomial content
/// stripped, i.e. q_0 != 0.
fn local_grid<F: Field>(
    op: &DiffOperator<F>,
    point: &Point<F>,
) -> Result<Vec<Poly<F>>, DiffOpError> {
    if op.is_zero() {
        return Err(DiffOpError::ZeroOperator);
    }
    let local = localize(op, point)
        .convert_basis(Basis::Theta)
        .strip_monomial_content();
    Ok(local.theta_grid())
}

/// Indicial polynomial in rho at a point; errors on irregular points
/// (Newton polygon with a positive slope, i.e. the lowest w-coefficient
/// has degree below the order).
pub fn indicial_polynomial<F: Field>(
    op: &DiffOperator<F>,
    point: &Point<F>,
) -> Result<Poly<F>, DiffOpError> {
    let grid = local_grid(op, point)?;
    let q0 = grid[0].clone();
    let order = grid.iter().map(|q| q.degree()).max().unwrap_or(0);
    if q0.degree() < order {
        return Err(DiffOpError::IrregularPoint);
    }
    Ok(q0)
}

/// Local exponents at a point: rational roots with multiplicity plus
/// irreducible higher-degree indicial factors kept unresolved.
pub fn local_exponents<F: ExponentField>(
    op: &DiffOperator<F>,
    point: &Point<F>,
) -> Result<ExponentMultiset, DiffOpError> {
    let ind = indicial_polynomial(op, point)?;
    Ok(F::exponents_of(&ind, ind.degree()))
}

/// Identifier of an unknown coefficient a_k^(m): w-offset k within the
/// exponent class, log power m.
type Cell = (usize, usize);

/// Linear expression over cells.
#[derive(Clone, Debug, Default)]
struct LinExpr<E> {
    terms: HashMap<Cell, E>,
}

impl<E: Clone + PartialEq> LinExpr<E> {
    fn add_term<F: Field<Elem = E>>(&mut self, f: &F, cell: Cell, c: E) {
        let entry = self.terms.entry(cell).or_insert_with(|| f.zero());
        *entry = f.add(entry, &c);
        if f.is_zero(entry) {
            self.terms.remove(&cell);
        }
    }

    fn add_scaled<F: Field<Elem = E>>(&mut self, f: &F, other: &LinExpr<E>, c: &E) {
        for (cell, v) in &other.terms {
            self.add_term(f, *cell, f.mul(v, c));
        }
    }

    fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Solves the log-ladder structure within one exponent class (exponents
/// differing by integers). `offsets` are the root offsets from the class
/// base, `shift` the field image of the base exponent.
fn solve_class<F: Field>(
    grid: &[Poly<F>],
    order: usize,
    shift: &F::Elem,
    max_offset: usize,
) -> ClassSolution<F> {
    let f = grid[0].field.clone();
    let d = grid.len() - 1;
    let m_top = order.saturating_sub(1);
    let k_solve = max_offset;
    let k_report = max_offset + order + 8;

    // Hasse derivatives q_j^(t)/t!
    let mut qd: Vec<Vec<Poly<F>>> = Vec::with_capacity(d + 1);
    for q in grid {
        let mut row = Vec::with_capacity(m_top + 1);
        row.push(q.clone());
        for t in 1..=m_top {
            row.push(hasse_derivative(&row[t - 1], t));
        }
        qd.push(row);
    }
    // rising products ff(n+t, t) = (n+1)(n+2)...(n+t)
    let ff = |n: usize, t: usize| -> F::Elem {
        let mut acc = f.one();
        for u in 1..=t {
            acc = f.mul(&acc, &f.from_i64((n + u) as i64));
        }
        acc
    };

    let mut solved: HashMap<Cell, LinExpr<F::Elem>> = HashMap::new();
    for k in 0..=k_solve {
        let arg = f.add(shift, &f.from_i64(k as i64));
        let _ = &arg;
        for n in (0..=m_top).rev() {
            // assemble C[k][n]
            let mut expr: LinExpr<F::Elem> = LinExpr { terms: HashMap::new() };
            for j in 0..=d.min(k) {
                let src_k = k - j;
                let x = f.add(shift, &f.from_i64(src_k as i64));
                for t in 0..=(m_top - n) {
                    let m = n + t;
                    let c0 = qd[j][t].eval(&x);
                    if f.is_zero(&c0) {
                        continue;
                    }
                    let c = f.mul(&c0, &ff(n, t));
                    let cell = (src_k, m);
                    if let Some(e) = solved.get(&cell) {
                        let e = e.clone();
                        expr.add_scaled(&f, &e, &c);
                    } else {
                        expr.add_term(&f, cell, c);
                    }
                }
            }
            if expr.is_empty() {
                continue;
            }
            // pivot: lowest log power m, then highest w index k
            let pivot = *expr
                .terms
                .keys()
                .min_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .unwrap();
            let pc = expr.terms.remove(&pivot).unwrap();
            let pc_inv = f.inv(&pc).expect("pivot coefficient invertible");
            let mut pexpr = LinExpr { terms: HashMap::new() };
            for (cell, v) in &expr.terms {
                pexpr.terms.insert(*cell, f.neg(&f.mul(v, &pc_inv)));
            }
            // keep all stored expressions in terms of unsolved cells
            for e in solved.values_mut() {
                if let Some(c) = e.terms.remove(&pivot) {
                    let p = pexpr.clone();
                    e.add_scaled(&f, &p, &c);
                }
            }
            solved.insert(pivot, pexpr);
        }
    }

    // free cells in deterministic order
    let mut free: Vec<Cell> = Vec::new();
    for k in 0..=k_solve {
        for m in 0..=m_top {
            if !solved.contains_key(&(k, m)) {
                free.push((k, m));
            }
        }
    }

    // numeric basis solutions, extended to k_report for valuations
    let mut basis: Vec<Vec<Vec<F::Elem>>> = Vec::new(); // [sol][k][m]
    for &fc in &free {
        let mut val = vec![vec![f.zero(); m_top + 1]; k_report + 1];
        val[fc.0][fc.1] = f.one();
        for k in 0..=k_solve {
            for m in 0..=m_top {
                if let Some(e) = solved.get(&(k, m)) {
                    let mut acc = f.zero();
                    for (cell, c) in &e.terms {
                        if *cell == fc {
                            acc = f.add(&acc, c);
                        }
                    }
                    val[k][m] = acc;
                }
            }
        }
        // forward extension: pivot (k, n) has coefficient q_0(shift + k)
        for k in (k_solve + 1)..=k_report {
            let x = f.add(shift, &f.from_i64(k as i64));
            for n in (0..=m_top).rev() {
                let mut acc = f.zero();
                for j in 0..=d.min(k) {
                    let src_k = k - j;
                    if src_k > k_report {
                        continue;
                    }
                    let xs = f.add(shift, &f.from_i64(src_k as i64));
                    for t in 0..=(m_top - n) {
                        let m = n + t;
                        if j == 0 && t == 0 {
                            continue; // the unknown itself
                        }
                        let c0 = qd[j][t].eval(&xs);
                        if f.is_zero(&c0) {
                            continue;
                        }
                        let c = f.mul(&c0, &ff(n, t));
                        let term = f.mul(&c, &val[src_k][m]);
                        acc = f.add(&acc, &term);
                    }
                }
                let q0 = qd[0][0].eval(&x);
                val[k][n] = f.neg(&f.div(&acc, &q0).expect("past all roots"));
            }
        }
        basis.push(val);
    }

    ClassSolution { field: f, free, basis, m_top, k_report }
}

struct ClassSolution<F: Field> {
    field: F,
    free: Vec<Cell>,
    basis: Vec<Vec<Vec<F::Elem>>>,
    m_top: usize,
    k_report: usize,
}

impl<F: Field> ClassSolution<F> {
    /// Valuation (w offset) of the log^m series of basis solution i.
    fn series_valuation(&self, i: usize, m: usize) -> Option<usize> {
        let f = &self.field;
        (0..=self.k_report).find(|&k| !f.is_zero(&self.basis[i][k][m]))
    }

    fn blocks(&self, base: &BigRational) -> Vec<LogBlock> {
        // group free cells by w offset
        let mut by_k: Vec<(usize, Vec<usize>)> = Vec::new(); // (k, cell indices)
        for (i, &(k, _m)) in self.free.iter().enumerate() {
            match by_k.iter_mut().find(|(kk, _)| *kk == k) {
                Some((_, v)) => v.push(i),
                None => by_k.push((k, vec![i])),
            }
        }
        by_k.sort_by_key(|&(k, _)| k);
        let mut blocks = Vec::new();
        for (k, cells) in by_k {
            let max_log = cells.iter().map(|&i| self.free[i].1).max().unwrap();
            let head = *cells
                .iter()
                .find(|&&i| self.free[i].1 == max_log)
                .unwrap();
            let mut attachments = Vec::new();
            for t in (0..=max_log).rev() {
                let v = match self.series_valuation(head, t) {
                    Some(v) => v,
                    None => {
                        // fall back to the ladder member with top power t
                        cells
                            .iter()
                            .find(|&&i| self.free[i].1 == t)
                            .and_then(|&i| self.series_valuation(i, t))
                            .unwrap_or(k)
                    }
                };
                attachments
                    .push(base + BigRational::from_integer((v as i64).into()));
            }
            blocks.push(LogBlock {
                leading_exponent: base + BigRational::from_integer((k as i64).into()),
                max_log_power: max_log,
                ladder_size: cells.len(),
                attachments,
            });
        }
        let _ = self.m_top;
        blocks
    }
}

fn hasse_derivative<F: Field>(prev: &Poly<F>, t: usize) -> Poly<F> {
    // iterated: D_t = D_(t-1) applied then divided by t
    let f = prev.field.clone();
    let d = prev.derivative();
    let inv_t = f.inv(&f.from_i64(t as i64)).expect("t below characteristic");
    d.scale(&inv_t)
}

/// Full basis description at a regular singular point: for each exponent
/// class, the ladder blocks with attachment exponents.
pub fn formal_log_solutions<F: ExponentField>(
    op: &DiffOperator<F>,
    point: &Point<F>,
) -> Result<LogStructure, DiffOpError> {
    let grid = local_grid(op, point)?;
    let order = grid.iter().map(|q| q.degree()).max().unwrap_or(0);
    let exps = local_exponents(op, point)?;
    if exps.rational.iter().map(|&(_, m)| m).sum::<usize>() == 0 {
        return Ok(LogStructure { blocks: Vec::new(), complete: exps.nonlinear.is_empty(), order });
    }

    // group exponents into integer-difference classes
    let mut classes: Vec<(BigRational, usize)> = Vec::new(); // (base, max offset)
    for (e, _m) in &exps.rational {
        match classes.iter_mut().find(|(b, _)| (e - &*b).is_integer()) {
            Some((b, max_off)) => {
                let diff = e - &*b;
                if diff.is_negative() {
                    // new smaller base; shift offsets
                    let shift = (-&diff).to_integer().to_usize().unwrap();
                    *max_off += shift;
                    *b = e.clone();
                } else {
                    let off = diff.to_integer().to_usize().unwrap();
                    if off > *max_off {
                        *max_off = off;
                    }
                }
            }
            None => classes.push((e.clone(), 0)),
        }
    }
    classes.sort_by(|a, b| a.0.cmp(&b.0));

    let f = op.field().clone();
    let mut blocks = Vec::new();
    for (base, max_off) in &classes {
        let Some(shift) = f.exponent_elem(base) else {
            continue;
        };
        let sol = solve_class(&grid, order, &shift, *max_off);
        blocks.extend(sol.blocks(base));
    }
    blocks.sort_by(|a, b| {
        a.leading_exponent
            .cmp(&b.leading_exponent)
            .then(a.max_log_power.cmp(&b.max_log_power))
    });
    Ok(LogStructure { blocks, complete: exps.nonlinear.is_empty(), order })
}

/// Ordinary / apparent / true-singular classification by Frobenius
/// solution counting.
pub fn classify_singularity<F: ExponentField>(
    op: &DiffOperator<F>,
    point: &Point<F>,
) -> Result<SingularityClass, DiffOpError> {
    let order = op.order();
    // fast path: the leading coefficient does not vanish at a finite point
    if let Point::Finite(c) = point {
        let ddw = op.convert_basis(Basis::Ddw);
        let lead = ddw.leading_poly();
        let all_content = (0..=ddw.order())
            .map(|i| ddw.coeff(i))
            .filter(|p| !p.is_zero())
            .map(|p| p.eval(c))
            .collect::<Vec<_>>();
        if !op.field().is_zero(&lead.eval(c)) {
            return Ok(SingularityClass::Ordinary);
        }
        // all coefficients vanishing at c means a removable common factor;
        // fall through to the Frobenius count either way
        let _ = all_content;
    }
    let exps = local_exponents(op, point)?;
    if !exps.nonlinear.is_empty() {
        return Ok(SingularityClass::TrueSingular);
    }
    // all exponents must be distinct non-negative integers
    let mut ints: Vec<i64> = Vec::new();
    for (e, m) in &exps.rational {
        if !e.is_integer() || e.is_negative() || *m > 1 {
            return Ok(SingularityClass::TrueSingular);
        }
        ints.push(e.to_integer().to_i64().unwrap());
    }
    ints.sort_unstable();
    let structure = formal_log_solutions(op, point)?;
    let no_logs = structure.blocks.iter().all(|b| b.max_log_power == 0);
    let full = structure.solution_count() == order;
    if no_logs && full {
        let expected: Vec<i64> = (0..order as i64).collect();
        if ints == expected {
            Ok(SingularityClass::Ordinary)
        } else {
            Ok(SingularityClass::Apparent)
        }
    } else {
        Ok(SingularityClass::TrueSingular)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::big_ratio;

    fn fp() -> Fp {
        Fp::new(32749).unwrap()
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn indicial_of_first_order_geometric() {
        let f = fp();
        // w(1-4w) D - 1 at 0: rho - 1
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0, 1, -4]]);
        let ind = indicial_polynomial(&l, &Point::origin(&f)).unwrap();
        assert_eq!(ind.monic(), Poly::from_i64(f, &[-1, 1]).monic());
    }

    #[test]
    fn exponents_of_euler_product() {
        let f = fp();
        // (theta - 1)(theta - 3): exponents {1, 3}
        let a = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[-1], &[1]]);
        let b = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[-3], &[1]]);
        let l = a.multiply(&b).unwrap();
        let e = local_exponents(&l, &Point::origin(&f)).unwrap();
        assert_eq!(e.rational, vec![(int(1), 1), (int(3), 1)]);
        assert_eq!(e.total_count(), 2);
    }

    #[test]
    fn irregular_point_detected() {
        let f = fp();
        // w^2 D - 1 is irregular at 0
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0, 0, 1]]);
        assert_eq!(
            indicial_polynomial(&l, &Point::origin(&f)),
            Err(DiffOpError::IrregularPoint)
        );
    }

    #[test]
    fn exponent_shift_law() {
        let f = fp();
        // exponents of translate(L, c) at 0 equal those of L at c
        let l = DiffOperator::from_i64_rows(
            f,
            Basis::Ddw,
            &[&[2, 1], &[0, 3, 1], &[0, 0, 1, 5]],
        );
        let c = 7u64;
        let at_c = local_exponents(&l, &Point::Finite(c)).unwrap();
        let translated = l.translate(&c);
        let at_0 = local_exponents(&translated, &Point::origin(&f)).unwrap();
        assert_eq!(at_c, at_0);
    }

    #[test]
    fn log_structure_of_theta_squared() {
        let f = fp();
        let t2 = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[0], &[0], &[1]]);
        let s = formal_log_solutions(&t2, &Point::origin(&f)).unwrap();
        assert_eq!(s.blocks.len(), 1);
        let b = &s.blocks[0];
        assert_eq!(b.leading_exponent, int(0));
        assert_eq!(b.max_log_power, 1);
        assert_eq!(b.ladder_size, 2);
        assert_eq!(b.attachments, vec![int(0), int(0)]);
    }

    #[test]
    fn log_structure_of_theta_cubed() {
        let f = fp();
        let t3 =
            DiffOperator::from_i64_rows(f, Basis::Theta, &[&[0], &[0], &[0], &[1]]);
        let s = formal_log_solutions(&t3, &Point::origin(&f)).unwrap();
        assert_eq!(s.blocks.len(), 1);
        assert_eq!(s.blocks[0].max_log_power, 2);
        assert_eq!(s.blocks[0].ladder_size, 3);
    }

    #[test]
    fn log_structure_of_shifted_double_exponent() {
        let f = fp();
        // (theta - 2)^2: block [w^2] log + [w^2]
        let a = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[-2], &[1]]);
        let l = a.multiply(&a).unwrap();
        let s = formal_log_solutions(&l, &Point::origin(&f)).unwrap();
        assert_eq!(s.blocks.len(), 1);
        let b = &s.blocks[0];
        assert_eq!(b.leading_exponent, int(2));
        assert_eq!(b.max_log_power, 1);
        assert_eq!(b.attachments, vec![int(2), int(2)]);
    }

    #[test]
    fn distinct_exponents_produce_separate_blocks() {
        let f = fp();
        // (theta)(theta - 5): solutions 1 and w^5, no logs
        let a = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[0], &[1]]);
        let b = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[-5], &[1]]);
        let l = a.multiply(&b).unwrap();
        let s = formal_log_solutions(&l, &Point::origin(&f)).unwrap();
        assert_eq!(s.blocks.len(), 2);
        assert!(s.blocks.iter().all(|b| b.max_log_power == 0));
        assert_eq!(s.solution_count(), 2);
    }

    #[test]
    fn classify_examples() {
        let f = fp();
        // d/dw at 0 is ordinary
        let d = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0], &[1]]);
        assert_eq!(
            classify_singularity(&d, &Point::origin(&f)).unwrap(),
            SingularityClass::Ordinary
        );
        // theta^2 at 0 is truly singular (log)
        let t2 = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[0], &[0], &[1]]);
        assert_eq!(
            classify_singularity(&t2, &Point::origin(&f)).unwrap(),
            SingularityClass::TrueSingular
        );
        // (theta)(theta - 2): exponents {0, 2} at a singular point with
        // a full analytic basis -> apparent
        let a = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[0], &[1]]);
        let b = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[-2], &[1]]);
        let l = a.multiply(&b).unwrap();
        assert_eq!(
            classify_singularity(&l, &Point::origin(&f)).unwrap(),
            SingularityClass::Apparent
        );
    }

    #[test]
    fn rational_context_exponents() {
        let q = Rationals;
        // 2 theta - 5: exponent 5/2
        let l = DiffOperator::from_i64_rows(q, Basis::Theta, &[&[-5], &[2]]);
        let e = local_exponents(&l, &Point::origin(&q)).unwrap();
        assert_eq!(e.rational, vec![(big_ratio(5, 2), 1)]);
    }

    #[test]
    fn exponents_at_infinity_flip_sign() {
        let f = fp();
        // theta - 7: w^7 solution; at infinity exponent -7
        let l = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[-7], &[1]]);
        let e = local_exponents(&l, &Point::Infinity).unwrap();
        assert_eq!(e.rational, vec![(int(-7), 1)]);
    }
}
